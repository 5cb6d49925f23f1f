//! Parity graphs `X0(Z)` and `X(Z, l*)`, their explicit automorphisms and
//! the witness pipeline for quantum-isomorphic, non-isomorphic pairs.
//!
//! A vertex `(l, S)` pairs an anchor `l` of `Z` with a set `S` of edges
//! incident to `l`; `S` is even, except at the marked anchor of `X(Z, l*)`
//! where it is odd. `(l, S) ~ (k, T)` iff `lk` is an edge of `Z` lying in
//! exactly one of `S` and `T`.

mod witness;

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::symmetry::{automorphism_group, Permutation};

pub use witness::{witness_pair, WitnessCheck, WitnessPair, WitnessReport};

/// Largest anchor degree accepted (fibres have `2^(deg-1)` vertices).
pub const MAX_DEGREE: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {vertex} has degree {degree}; at most {MAX_DEGREE} is supported")]
    DegreeTooLarge { vertex: usize, degree: usize },
    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("marked vertex {0} is out of range")]
    MarkedOutOfRange(usize),
    #[error("permutation is not an automorphism of Z")]
    NotAnAutomorphism,
    #[error("permutation moves the marked vertex {0}")]
    MovesMarked(usize),
    #[error("edge set is not even: vertex {0} meets it an odd number of times")]
    NotEven(usize),
    #[error("edge {edge} is not incident to anchor {anchor}")]
    NotIncident { anchor: usize, edge: usize },
    #[error("edge subset at anchor {anchor} has the wrong parity for this graph")]
    WrongParity { anchor: usize },
    #[error("Z has a cut vertex ({0}); fibre transport needs a 2-connected graph")]
    CutVertex(usize),
    #[error("Z is not vertex transitive ({orbits} orbits)")]
    NotVertexTransitive { orbits: usize },
    #[error(
        "Z is planar: by Arkhipov's theorem its parity system has no operator solution, so the two \
         parity graphs are not quantum isomorphic; refusing"
    )]
    Planar,
    #[error("internal check failed: {0}")]
    CheckFailed(String),
}

/// Anchor plus incident-edge subset. Bit `deg - 1 - t` of `mask` holds the
/// `t`-th incident edge (edges sorted by the other endpoint), so masks
/// increase in enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ParityVertex {
    pub anchor: usize,
    pub mask: u32,
}

fn bit_in(incident: &[usize], e: usize) -> u32 {
    let t = incident.binary_search(&e).expect("edge incident to anchor");
    1 << (incident.len() - 1 - t)
}

/// A built parity graph together with its vertex coordinates.
#[derive(Debug, Clone)]
pub struct ParityGraph {
    z: Graph,
    marked: Option<usize>,
    vertices: Vec<ParityVertex>,
    // first vertex index of each anchor's fibre
    fibre_start: Vec<usize>,
    // incident edge ids of each anchor, increasing
    incident: Vec<Vec<usize>>,
    graph: Graph,
}

impl ParityGraph {
    fn build(z: &Graph, marked: Option<usize>) -> Result<Self, ConstructError> {
        if !z.is_connected() {
            return Err(GraphError::Disconnected.into());
        }
        if let Some(m) = marked {
            if m >= z.n() {
                return Err(ConstructError::MarkedOutOfRange(m));
            }
        }
        let n = z.n();
        let mut incident = Vec::with_capacity(n);
        for v in 0..n {
            let d = z.degree(v);
            if d == 0 {
                return Err(ConstructError::IsolatedVertex(v));
            }
            if d > MAX_DEGREE {
                return Err(ConstructError::DegreeTooLarge { vertex: v, degree: d });
            }
            incident.push(z.neighbors(v).iter().map(|&w| z.edge_index(v, w).unwrap()).collect::<Vec<_>>());
        }
        let mut vertices = Vec::new();
        let mut fibre_start = Vec::with_capacity(n);
        for (anchor, inc) in incident.iter().enumerate() {
            fibre_start.push(vertices.len());
            let odd = marked == Some(anchor);
            for mask in 0u32..1 << inc.len() {
                if (mask.count_ones() % 2 == 1) == odd {
                    vertices.push(ParityVertex { anchor, mask });
                }
            }
        }
        let fibre = |a: usize| fibre_start[a]..fibre_start.get(a + 1).copied().unwrap_or(vertices.len());
        let mut edges = Vec::new();
        for (e, &(l, k)) in z.edges().iter().enumerate() {
            let (bl, bk) = (bit_in(&incident[l], e), bit_in(&incident[k], e));
            for a in fibre(l) {
                for b in fibre(k) {
                    let in_s = vertices[a].mask & bl != 0;
                    let in_t = vertices[b].mask & bk != 0;
                    if in_s != in_t {
                        edges.push((a.min(b), a.max(b)));
                    }
                }
            }
        }
        let labels = vertices
            .iter()
            .map(|v| format!("{}:{:0width$b}", v.anchor, v.mask, width = incident[v.anchor].len()))
            .collect();
        let graph = Graph::new(vertices.len(), edges)?.with_labels(labels)?;
        Ok(ParityGraph { z: z.clone(), marked, vertices, fibre_start, incident, graph })
    }

    /// Mask bit of edge `e` at `anchor`.
    fn bit(&self, anchor: usize, e: usize) -> u32 {
        bit_in(&self.incident[anchor], e)
    }

    fn fibre(&self, anchor: usize) -> std::ops::Range<usize> {
        let end = self.fibre_start.get(anchor + 1).copied().unwrap_or(self.vertices.len());
        self.fibre_start[anchor]..end
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn z(&self) -> &Graph {
        &self.z
    }

    pub fn marked(&self) -> Option<usize> {
        self.marked
    }

    pub fn vertices(&self) -> &[ParityVertex] {
        &self.vertices
    }

    /// Edge ids incident to `anchor`, increasing.
    pub fn incident_edges(&self, anchor: usize) -> &[usize] {
        &self.incident[anchor]
    }

    pub fn mask_of(&self, anchor: usize, edges: &[usize]) -> Result<u32, ConstructError> {
        let mut mask = 0;
        for &e in edges {
            if self.incident[anchor].binary_search(&e).is_err() {
                return Err(ConstructError::NotIncident { anchor, edge: e });
            }
            mask ^= self.bit(anchor, e);
        }
        Ok(mask)
    }

    /// Edge ids of the subset of vertex `v`.
    pub fn edge_subset(&self, v: usize) -> Vec<usize> {
        let ParityVertex { anchor, mask } = self.vertices[v];
        self.incident[anchor].iter().copied().filter(|&e| mask & self.bit(anchor, e) != 0).collect()
    }

    pub fn index_of(&self, v: ParityVertex) -> Option<usize> {
        if v.anchor >= self.incident.len() {
            return None;
        }
        self.vertices[self.fibre(v.anchor)].binary_search(&v).ok().map(|i| i + self.fibre_start[v.anchor])
    }

    /// Label sidecar: one `v anchor mask` line per vertex.
    pub fn label_sidecar(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(out, "{i} {} {}", v.anchor, v.mask).unwrap();
        }
        out
    }

    fn check(&self, p: Permutation, what: &str) -> Result<Permutation, ConstructError> {
        if p.is_automorphism(&self.graph) {
            Ok(p)
        } else {
            Err(ConstructError::CheckFailed(format!("{what} is not an automorphism")))
        }
    }
}

pub fn build_x0(z: &Graph) -> Result<ParityGraph, ConstructError> {
    ParityGraph::build(z, None)
}

pub fn build_x(z: &Graph, marked: usize) -> Result<ParityGraph, ConstructError> {
    ParityGraph::build(z, Some(marked))
}

/// `(l, S) -> (s(l), s(S))` for an automorphism `s` of `Z` (which must fix
/// the marked anchor, if any); checked to be an automorphism.
pub fn lift_automorphism(pg: &ParityGraph, sigma: &Permutation) -> Result<Permutation, ConstructError> {
    let z = &pg.z;
    if sigma.degree() != z.n() || !sigma.is_automorphism(z) {
        return Err(ConstructError::NotAnAutomorphism);
    }
    if let Some(m) = pg.marked {
        if sigma.apply(m) != m {
            return Err(ConstructError::MovesMarked(m));
        }
    }
    let images = (0..pg.vertices.len())
        .map(|v| {
            let anchor = pg.vertices[v].anchor;
            let target = sigma.apply(anchor);
            let mut mask = 0;
            for e in pg.edge_subset(v) {
                let (a, b) = z.edges()[e];
                let img = z.edge_index(sigma.apply(a), sigma.apply(b)).expect("automorphism maps edges to edges");
                mask |= pg.bit(target, img);
            }
            pg.index_of(ParityVertex { anchor: target, mask }).expect("parity preserved")
        })
        .collect();
    pg.check(Permutation::from_images(images).expect("lift is a bijection"), "lifted map")
}

/// `(l, S) -> (l, S xor (E(l) & F))` for an even edge set `F`; checked to
/// be an automorphism.
pub fn even_subgraph_automorphism(pg: &ParityGraph, f_edges: &[usize]) -> Result<Permutation, ConstructError> {
    let z = &pg.z;
    let mut in_f = vec![false; z.edge_count()];
    for &e in f_edges {
        if e >= z.edge_count() {
            return Err(ConstructError::CheckFailed(format!("edge id {e} out of range")));
        }
        in_f[e] ^= true;
    }
    let mut flip = vec![0u32; z.n()];
    for (e, &(a, b)) in z.edges().iter().enumerate() {
        if in_f[e] {
            flip[a] ^= pg.bit(a, e);
            flip[b] ^= pg.bit(b, e);
        }
    }
    if let Some(v) = flip.iter().position(|m| m.count_ones() % 2 == 1) {
        return Err(ConstructError::NotEven(v));
    }
    let images = pg
        .vertices
        .iter()
        .map(|&ParityVertex { anchor, mask }| {
            pg.index_of(ParityVertex { anchor, mask: mask ^ flip[anchor] }).expect("parity preserved")
        })
        .collect();
    pg.check(Permutation::from_images(images).expect("flip is a bijection"), "even-subgraph map")
}

/// Shortest path from `from` to `to` avoiding `avoid`, as edge ids. BFS
/// scans neighbours in increasing order, so ties go to lower indices.
fn path_avoiding(z: &Graph, avoid: usize, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; z.n()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut edges = Vec::new();
            let mut v = to;
            while v != from {
                edges.push(z.edge_index(v, parent[v]).unwrap());
                v = parent[v];
            }
            edges.reverse();
            return Some(edges);
        }
        for &w in z.neighbors(u) {
            if w != avoid && parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    None
}

/// An automorphism taking `(anchor, s)` to `(anchor, t)`, built from one
/// cycle through `anchor` per pair of edges of `s xor t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibreTransport {
    pub cycles: Vec<Vec<usize>>,
    pub map: Permutation,
}

pub fn fiber_transporter(pg: &ParityGraph, anchor: usize, s: &[usize], t: &[usize]) -> Result<FibreTransport, ConstructError> {
    let z = &pg.z;
    if let Some(&c) = z.cut_vertices()?.first() {
        return Err(ConstructError::CutVertex(c));
    }
    let (ms, mt) = (pg.mask_of(anchor, s)?, pg.mask_of(anchor, t)?);
    let (src, dst) = (ParityVertex { anchor, mask: ms }, ParityVertex { anchor, mask: mt });
    let (Some(src_idx), Some(dst_idx)) = (pg.index_of(src), pg.index_of(dst)) else {
        return Err(ConstructError::WrongParity { anchor });
    };
    let diff: Vec<usize> = pg.incident[anchor].iter().copied().filter(|&e| (ms ^ mt) & pg.bit(anchor, e) != 0).collect();
    let mut map = Permutation::identity(pg.vertices.len());
    let mut cycles = Vec::new();
    let far = |e: usize| {
        let (a, b) = z.edges()[e];
        if a == anchor { b } else { a }
    };
    for pair in diff.chunks(2) {
        let (e, f) = (pair[0], pair[1]);
        let path = path_avoiding(z, anchor, far(e), far(f))
            .ok_or_else(|| ConstructError::CheckFailed("no path avoiding the anchor".into()))?;
        let mut cycle = vec![e];
        cycle.extend(path);
        cycle.push(f);
        map = map.then(&even_subgraph_automorphism(pg, &cycle)?);
        cycles.push(cycle);
    }
    if map.apply(src_idx) != dst_idx {
        return Err(ConstructError::CheckFailed("transport misses its target".into()));
    }
    Ok(FibreTransport { cycles, map })
}

/// How one vertex of `X0(Z)` is reached from the base vertex `(0, {})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportEntry {
    pub target: usize,
    /// Indices into the generators of `Aut(Z)`, applied left to right.
    pub z_word: Vec<usize>,
    /// Cycles whose even-subgraph maps follow the lifted map.
    pub cycles: Vec<Vec<usize>>,
    pub map: Permutation,
}

/// One transporting automorphism per vertex of `X0(Z)`, starting from
/// vertex 0. Any ordered pair `(u, v)` is covered by `entry(u)^-1` then
/// `entry(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityCertificate {
    pub z_generators: Vec<Permutation>,
    pub entries: Vec<TransportEntry>,
}

impl TransitivityCertificate {
    /// Re-evaluates every word and checks it is an automorphism taking
    /// vertex 0 to its target.
    pub fn verify(&self, pg: &ParityGraph) -> Result<(), ConstructError> {
        if self.entries.len() != pg.vertices.len() {
            return Err(ConstructError::CheckFailed("certificate does not cover every vertex".into()));
        }
        for (v, entry) in self.entries.iter().enumerate() {
            let mut sigma = Permutation::identity(pg.z.n());
            for &g in &entry.z_word {
                let gen = self
                    .z_generators
                    .get(g)
                    .ok_or_else(|| ConstructError::CheckFailed(format!("unknown generator {g}")))?;
                sigma = sigma.then(gen);
            }
            let mut map = lift_automorphism(pg, &sigma)?;
            for c in &entry.cycles {
                map = map.then(&even_subgraph_automorphism(pg, c)?);
            }
            if map != entry.map || entry.target != v || map.apply(0) != v {
                return Err(ConstructError::CheckFailed(format!("entry for vertex {v} does not evaluate")));
            }
        }
        Ok(())
    }

    /// An automorphism mapping `u` to `v`.
    pub fn transport(&self, u: usize, v: usize) -> Permutation {
        self.entries[u].map.inverse().then(&self.entries[v].map)
    }
}

pub fn certify_vertex_transitive_x0(z: &Graph) -> Result<(ParityGraph, TransitivityCertificate), ConstructError> {
    let pg = build_x0(z)?;
    let aut = automorphism_group(z);
    let gens = aut.generators().to_vec();
    // Schreier tree from anchor 0: a word in the generators for each anchor
    let mut words: Vec<Option<Vec<usize>>> = vec![None; z.n()];
    words[0] = Some(Vec::new());
    let mut perms = vec![None; z.n()];
    perms[0] = Some(Permutation::identity(z.n()));
    let mut queue = VecDeque::from([0]);
    while let Some(a) = queue.pop_front() {
        for (gi, g) in gens.iter().enumerate() {
            let b = g.apply(a);
            if words[b].is_none() {
                let mut w = words[a].clone().unwrap();
                w.push(gi);
                words[b] = Some(w);
                perms[b] = Some(perms[a].as_ref().unwrap().then(g));
                queue.push_back(b);
            }
        }
    }
    if words.iter().any(Option::is_none) {
        let orbits = crate::symmetry::orbits(&aut).len();
        return Err(ConstructError::NotVertexTransitive { orbits });
    }
    let mut entries = Vec::with_capacity(pg.vertices.len());
    for (v, &ParityVertex { anchor, .. }) in pg.vertices.iter().enumerate() {
        let lifted = lift_automorphism(&pg, perms[anchor].as_ref().unwrap())?;
        // the lift sends (0, {}) to (anchor, {})
        let target_set = pg.edge_subset(v);
        let transport = fiber_transporter(&pg, anchor, &[], &target_set)?;
        let map = lifted.then(&transport.map);
        if map.apply(0) != v {
            return Err(ConstructError::CheckFailed(format!("composed map misses vertex {v}")));
        }
        entries.push(TransportEntry { target: v, z_word: words[anchor].clone().unwrap(), cycles: transport.cycles, map });
    }
    let cert = TransitivityCertificate { z_generators: gens, entries };
    cert.verify(&pg)?;
    Ok((pg, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::*;
    use crate::lbcs::{arkhipov_lbcs, game_graph, homogenize};

    #[test]
    fn vertex_counts() {
        let k33 = complete_bipartite(3, 3).unwrap();
        assert_eq!(build_x0(&k33).unwrap().graph().n(), 24);
        assert_eq!(build_x(&k33, 0).unwrap().graph().n(), 24);
        let k5 = complete_graph(5).unwrap();
        assert_eq!(build_x(&k5, 2).unwrap().graph().n(), 40);
        let p = petersen_graph();
        assert_eq!(build_x0(&p).unwrap().graph().n(), 10 * 4);
        assert!(build_x0(&disjoint_union(&k33, &k33)).is_err());
    }

    #[test]
    fn x0_is_the_homogeneous_game_graph_without_cliques() {
        for z in [complete_bipartite(3, 3).unwrap(), complete_graph(5).unwrap(), petersen_graph()] {
            let x0 = build_x0(&z).unwrap();
            let f0 = homogenize(&arkhipov_lbcs(&z, 0).unwrap());
            let gg = game_graph(&f0, false).unwrap();
            assert_eq!(x0.graph().edges(), gg.edges());
            // with cliques the graphs differ by exactly the fibre cliques
            let with = game_graph(&f0, true).unwrap();
            let clique_edges: usize = (0..z.n()).map(|l| {
                let s = 1usize << (z.degree(l) - 1);
                s * (s - 1) / 2
            }).sum();
            assert_eq!(with.edge_count(), x0.graph().edge_count() + clique_edges);
            let x = build_x(&z, 1).unwrap();
            let g1 = game_graph(&arkhipov_lbcs(&z, 1).unwrap(), false).unwrap();
            assert_eq!(x.graph().edges(), g1.edges());
        }
    }

    #[test]
    fn coordinates() {
        let k33 = complete_bipartite(3, 3).unwrap();
        let x0 = build_x0(&k33).unwrap();
        assert_eq!(x0.graph().labels().unwrap()[1], "0:011");
        assert_eq!(x0.edge_subset(1), vec![1, 2]);
        assert_eq!(x0.index_of(ParityVertex { anchor: 0, mask: 0b011 }), Some(1));
        assert_eq!(x0.index_of(ParityVertex { anchor: 0, mask: 0b001 }), None);
        assert!(x0.label_sidecar().starts_with("0 0 0\n1 0 3\n"));
    }

    #[test]
    fn lifts_and_cycles() {
        let k33 = complete_bipartite(3, 3).unwrap();
        let x0 = build_x0(&k33).unwrap();
        assert!(lift_automorphism(&x0, &Permutation::identity(6)).unwrap().is_identity());
        let swap = Permutation::from_images(vec![3, 4, 5, 0, 1, 2]).unwrap();
        let lifted = lift_automorphism(&x0, &swap).unwrap();
        for v in 0..24 {
            assert_eq!(x0.vertices()[lifted.apply(v)].anchor, swap.apply(x0.vertices()[v].anchor));
        }
        let within = Permutation::from_images(vec![1, 0, 2, 3, 4, 5]).unwrap();
        assert!(lift_automorphism(&x0, &within).is_ok());
        let not_aut = Permutation::from_images(vec![3, 1, 2, 0, 4, 5]).unwrap();
        assert_eq!(lift_automorphism(&x0, &not_aut), Err(ConstructError::NotAnAutomorphism));
        assert!(even_subgraph_automorphism(&x0, &[]).unwrap().is_identity());
        // 4-cycle 0-3-1-4-0
        let e = |a, b| k33.edge_index(a, b).unwrap();
        let c1 = vec![e(0, 3), e(1, 3), e(1, 4), e(0, 4)];
        let c2 = vec![e(0, 4), e(2, 4), e(2, 5), e(0, 5)];
        let m1 = even_subgraph_automorphism(&x0, &c1).unwrap();
        let m2 = even_subgraph_automorphism(&x0, &c2).unwrap();
        let both: Vec<usize> = c1.iter().filter(|x| !c2.contains(x)).chain(c2.iter().filter(|x| !c1.contains(x))).copied().collect();
        assert_eq!(m1.then(&m2), even_subgraph_automorphism(&x0, &both).unwrap());
        assert_eq!(even_subgraph_automorphism(&x0, &[e(0, 3)]), Err(ConstructError::NotEven(0)));
    }

    #[test]
    fn transport_within_a_fibre() {
        let k33 = complete_bipartite(3, 3).unwrap();
        let x0 = build_x0(&k33).unwrap();
        let inc = x0.incident_edges(0).to_vec();
        let same = fiber_transporter(&x0, 0, &inc[..2], &inc[..2]).unwrap();
        assert!(same.map.is_identity());
        let one = fiber_transporter(&x0, 0, &[], &inc[..2]).unwrap();
        assert_eq!(one.cycles.len(), 1);
        let k5 = complete_graph(5).unwrap();
        let y0 = build_x0(&k5).unwrap();
        let inc = y0.incident_edges(0).to_vec();
        let two = fiber_transporter(&y0, 0, &[], &inc).unwrap();
        assert_eq!(two.cycles.len(), 2);
        assert!(matches!(fiber_transporter(&y0, 0, &[], &inc[..1]), Err(ConstructError::WrongParity { .. })));
        let p4 = build_x0(&path_graph(4).unwrap()).unwrap();
        assert!(matches!(fiber_transporter(&p4, 1, &[], &[]), Err(ConstructError::CutVertex(1))));
    }

    #[test]
    fn transitivity_certificates() {
        let (x0, cert) = certify_vertex_transitive_x0(&complete_bipartite(3, 3).unwrap()).unwrap();
        assert_eq!(cert.entries.len(), 24);
        let t = cert.transport(5, 17);
        assert!(t.is_automorphism(x0.graph()));
        assert_eq!(t.apply(5), 17);
        assert!(matches!(
            certify_vertex_transitive_x0(&path_graph(3).unwrap()),
            Err(ConstructError::NotVertexTransitive { orbits: 2 })
        ));
    }
}
