//! End-to-end witness for a quantum-isomorphic, non-isomorphic pair built
//! from a non-planar vertex-transitive graph.

use serde::Serialize;

use super::{build_x, certify_vertex_transitive_x0, ConstructError, ParityGraph, TransitivityCertificate};
use crate::coherent::{cospectral_report, wl_closure, wl_equivalent, CospectralReport, EquivalenceCertificate, WlComparison};
use crate::graph::{disjoint_union, Graph, GraphError};
use crate::symmetry::{automorphism_group, find_isomorphism, orbits};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub z_vertices: usize,
    pub z_edges: usize,
    pub marked: usize,
    pub complement: bool,
    pub x0_vertices: usize,
    pub x_vertices: usize,
    pub union_vertices: usize,
    /// Checks (a) to (e), in order.
    pub checks: Vec<WitnessCheck>,
    pub isomorphism_search_nodes: usize,
    pub wl_certificate: Option<EquivalenceCertificate>,
    pub cospectral: CospectralReport,
    pub x0_aut_order: String,
    pub x_aut_order: String,
    pub union_aut_order: String,
    /// Reported for reference; no claim is attached to it.
    pub x_vertex_transitive: bool,
    /// Some WL vertex fibre of the union meets both sides.
    pub wl_fibres_mix_sides: bool,
    /// No automorphism orbit of the union meets both sides.
    pub orbits_separate_sides: bool,
}

impl WitnessReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Graphs and certificates behind a [`WitnessReport`]. With the complement
/// option, `x0_graph`, `x_graph` and `union` are complements of the parity
/// graphs and of their disjoint union.
#[derive(Debug, Clone)]
pub struct WitnessPair {
    pub x0: ParityGraph,
    pub x: ParityGraph,
    pub x0_graph: Graph,
    pub x_graph: Graph,
    pub union: Graph,
    pub transitivity: TransitivityCertificate,
    pub report: WitnessReport,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> WitnessCheck {
    WitnessCheck { name, passed, detail: detail.into() }
}

/// Builds `X0(Z)`, `X(Z, marked)` and their disjoint union and runs the
/// five checks: (a) not isomorphic, (b) WL-equivalent, (c) `X0`
/// vertex transitive, (d) the union not vertex transitive, (e) cospectral.
pub fn witness_pair(z: &Graph, marked: usize, complement: bool) -> Result<WitnessPair, ConstructError> {
    if !z.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    if z.is_planar() {
        return Err(ConstructError::Planar);
    }
    let x = build_x(z, marked)?;
    let (x0, transitivity) = certify_vertex_transitive_x0(z)?;
    let (mut g0, mut g1) = (x0.graph().clone(), x.graph().clone());
    let mut union = disjoint_union(&g0, &g1);
    if complement {
        g0 = g0.complement();
        g1 = g1.complement();
        union = union.complement();
    }
    let n0 = g0.n();

    let ((iso, wl), (cospectral, (aut0, aut1, aut_u))) = rayon::join(
        || rayon::join(|| find_isomorphism(&g0, &g1), || wl_equivalent(&g0, &g1)),
        || {
            let cs = cospectral_report(&g0, &g1).expect("equal vertex counts");
            (cs, (automorphism_group(&g0), automorphism_group(&g1), automorphism_group(&union)))
        },
    );

    let a = check(
        "not isomorphic",
        iso.isomorphism.is_none(),
        format!("exhaustive search visited {} nodes", iso.nodes),
    );
    let (b, wl_certificate) = match wl {
        WlComparison::Equivalent { certificate, x: cx, y: cy } => {
            let verified = certificate.verify(&g0, &cx, &g1, &cy);
            let ok = verified.is_ok() && certificate.maps_edges_to_edges;
            let detail = match verified {
                Ok(()) => format!(
                    "{} classes, {} intersection numbers checked, {} rounds",
                    certificate.map.len(),
                    certificate.intersection_entries_checked,
                    certificate.rounds
                ),
                Err(e) => e,
            };
            (check("WL-equivalent", ok, detail), Some(certificate))
        }
        WlComparison::Distinguished { round, reason } => {
            (check("WL-equivalent", false, format!("distinguished at round {round}: {reason}")), None)
        }
    };
    let orbits0 = orbits(&aut0).len();
    let cert_ok = transitivity.verify(&x0).is_ok()
        && transitivity.entries.iter().all(|e| e.map.is_automorphism(&g0));
    let c = check(
        "X0 vertex transitive",
        cert_ok && orbits0 == 1,
        format!(
            "certificate covers {} vertices; search finds {} orbit(s)",
            transitivity.entries.len(),
            orbits0
        ),
    );
    let union_orbits = orbits(&aut_u);
    let d = check(
        "union not vertex transitive",
        union_orbits.len() > 1,
        format!("{} orbit(s) on {} vertices", union_orbits.len(), union.n()),
    );
    let e = check(
        "cospectral",
        cospectral.all(),
        format!(
            "max deviations {:.1e} / {:.1e} / {:.1e}",
            cospectral.max_deviation[0], cospectral.max_deviation[1], cospectral.max_deviation[2]
        ),
    );

    let wl_union = wl_closure(&union);
    let wl_fibres_mix_sides = wl_union.vertex_fibres().iter().any(|f| f.iter().any(|&v| v < n0) && f.iter().any(|&v| v >= n0));
    let orbits_separate_sides = union_orbits.iter().all(|o| o.iter().all(|&v| v < n0) || o.iter().all(|&v| v >= n0));

    let report = WitnessReport {
        z_vertices: z.n(),
        z_edges: z.edge_count(),
        marked,
        complement,
        x0_vertices: g0.n(),
        x_vertices: g1.n(),
        union_vertices: union.n(),
        checks: vec![a, b, c, d, e],
        isomorphism_search_nodes: iso.nodes,
        wl_certificate,
        cospectral,
        x0_aut_order: aut0.order().to_string(),
        x_aut_order: aut1.order().to_string(),
        union_aut_order: aut_u.order().to_string(),
        x_vertex_transitive: orbits(&aut1).len() == 1,
        wl_fibres_mix_sides,
        orbits_separate_sides,
    };
    Ok(WitnessPair { x0, x, x0_graph: g0, x_graph: g1, union, transitivity, report })
}
