//! Spectra of adjacency, Laplacian and signless Laplacian matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::CoherentError;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumKind {
    Adjacency,
    Laplacian,
    SignlessLaplacian,
}

impl SpectrumKind {
    pub const ALL: [SpectrumKind; 3] = [SpectrumKind::Adjacency, SpectrumKind::Laplacian, SpectrumKind::SignlessLaplacian];

    fn matrix(self, g: &Graph) -> DMatrix<f64> {
        let n = g.n();
        DMatrix::from_fn(n, n, |i, j| {
            let a = f64::from(u8::from(g.has_edge(i, j)));
            match self {
                SpectrumKind::Adjacency => a,
                SpectrumKind::Laplacian if i == j => g.degree(i) as f64,
                SpectrumKind::Laplacian => -a,
                SpectrumKind::SignlessLaplacian if i == j => g.degree(i) as f64,
                SpectrumKind::SignlessLaplacian => a,
            }
        })
    }
}

/// Eigenvalues in ascending order.
pub fn sorted_spectrum(g: &Graph, kind: SpectrumKind) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(kind.matrix(g)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CospectralReport {
    pub adjacency: bool,
    pub laplacian: bool,
    pub signless_laplacian: bool,
    /// Largest sorted-eigenvalue difference per matrix kind.
    pub max_deviation: [f64; 3],
}

impl CospectralReport {
    pub fn all(&self) -> bool {
        self.adjacency && self.laplacian && self.signless_laplacian
    }
}

/// Compares sorted spectra in the max norm. Two spectra agree when they
/// differ by at most `1e-8 * max(1, s)`, where `s` is the largest absolute
/// eigenvalue of either matrix (the spectral norm of a symmetric matrix).
pub fn cospectral_report(x: &Graph, y: &Graph) -> Result<CospectralReport, CoherentError> {
    if x.n() != y.n() {
        return Err(CoherentError::SizeMismatch(x.n(), y.n()));
    }
    let mut verdict = [false; 3];
    let mut max_deviation = [0.0; 3];
    for (slot, kind) in SpectrumKind::ALL.into_iter().enumerate() {
        let (sx, sy) = (sorted_spectrum(x, kind), sorted_spectrum(y, kind));
        let norm = sx.iter().chain(&sy).fold(1.0f64, |m, v| m.max(v.abs()));
        let dev = sx.iter().zip(&sy).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        max_deviation[slot] = dev;
        verdict[slot] = dev <= 1e-8 * norm;
    }
    Ok(CospectralReport {
        adjacency: verdict[0],
        laplacian: verdict[1],
        signless_laplacian: verdict[2],
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::*;

    #[test]
    fn triangle_versus_path() {
        let k3 = complete_graph(3).unwrap();
        let p3 = path_graph(3).unwrap();
        // x^3 - 3x - 2 = (x - 2)(x + 1)^2 ; x^3 - 2x
        let sk = sorted_spectrum(&k3, SpectrumKind::Adjacency);
        let sp = sorted_spectrum(&p3, SpectrumKind::Adjacency);
        for (a, b) in sk.iter().zip([-1.0, -1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let r2 = 2f64.sqrt();
        for (a, b) in sp.iter().zip([-r2, 0.0, r2]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(!cospectral_report(&k3, &p3).unwrap().adjacency);
    }

    #[test]
    fn self_comparison() {
        let g = random_graph(20, 1).unwrap();
        assert!(cospectral_report(&g, &g).unwrap().all());
        assert!(matches!(
            cospectral_report(&g, &complete_graph(3).unwrap()),
            Err(CoherentError::SizeMismatch(20, 3))
        ));
    }

    #[test]
    fn laplacian_has_zero_per_component() {
        let g = disjoint_union(&cycle_graph(4).unwrap(), &path_graph(3).unwrap());
        let zeros = sorted_spectrum(&g, SpectrumKind::Laplacian).iter().filter(|v| v.abs() < 1e-9).count();
        assert_eq!(zeros, 2);
    }

    #[test]
    fn star_and_square_plus_vertex_are_adjacency_cospectral_only() {
        // K_{1,4} and C_4 + K_1 share the adjacency spectrum {-2, 0, 0, 0, 2}
        let star = complete_bipartite(1, 4).unwrap();
        let other = disjoint_union(&cycle_graph(4).unwrap(), &Graph::empty(1).unwrap());
        let r = cospectral_report(&star, &other).unwrap();
        assert!(r.adjacency);
        assert!(!r.laplacian);
    }
}
