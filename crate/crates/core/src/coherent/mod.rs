//! Coherent configurations: partitions of ordered vertex pairs that are
//! closed under converse, respect the diagonal and have constant
//! intersection numbers `p_ij^k`.
//!
//! [`wl_closure`] computes the coherent configuration of a graph by
//! two-dimensional Weisfeiler–Leman refinement; [`wl_equivalent`] runs the
//! refinement on two graphs in lockstep with a shared colour naming and
//! returns an [`EquivalenceCertificate`] when they cannot be told apart.

mod io;
mod spectrum;
mod wl;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{circulant, Graph, GraphError};
use crate::linalg::Matrix;

pub use io::{
    parse_certificate, parse_configuration, parse_intersection_numbers, write_certificate,
    write_configuration, write_intersection_numbers,
};
pub use spectrum::{cospectral_report, sorted_spectrum, CospectralReport, SpectrumKind};
pub use wl::{wl_closure, wl_equivalent, WlComparison};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoherentError {
    #[error("matrix is {rows}x{cols}, expected {n}x{n}")]
    DimensionMismatch { rows: usize, cols: usize, n: usize },
    #[error("graphs have {0} and {1} vertices")]
    SizeMismatch(usize, usize),
    #[error("class ids must be dense 0..r: {0}")]
    BadColoring(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// First axiom that a candidate configuration breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum AxiomViolation {
    /// A class meets the diagonal and the off-diagonal.
    MixedDiagonal { class: u32, diagonal: (usize, usize), off_diagonal: (usize, usize) },
    /// The converse of a class is not a class.
    ConverseNotAClass { class: u32, pair: (usize, usize), other: (usize, usize) },
    /// `p_ij^k` depends on the witness pair.
    IntersectionNotConstant {
        i: u32,
        j: u32,
        k: u32,
        witness: (usize, usize),
        expected: u64,
        found: u64,
    },
}

/// A partition of `V x V` into classes `0..r`, with derived converse map
/// and intersection numbers.
///
/// The derived data is read off one representative pair per class (the
/// first in row-major order); [`CoherentConfiguration::verify`] re-checks
/// every pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentConfiguration {
    n: usize,
    r: usize,
    color: Vec<u32>,
    class_sizes: Vec<usize>,
    representatives: Vec<(usize, usize)>,
    diagonal_classes: Vec<u32>,
    converse: Vec<u32>,
    intersection: BTreeMap<(u32, u32, u32), u64>,
}

impl CoherentConfiguration {
    /// Wraps a dense colouring (`ids` in `0..r`, all used) without renaming.
    pub fn from_dense(n: usize, color: Vec<u32>) -> Result<Self, CoherentError> {
        if color.len() != n * n {
            return Err(CoherentError::BadColoring(format!("{} entries for n = {n}", color.len())));
        }
        let r = color.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut representatives = vec![None; r];
        let mut class_sizes = vec![0; r];
        for (idx, &c) in color.iter().enumerate() {
            class_sizes[c as usize] += 1;
            representatives[c as usize].get_or_insert((idx / n, idx % n));
        }
        let representatives = representatives
            .into_iter()
            .enumerate()
            .map(|(c, rep)| rep.ok_or_else(|| CoherentError::BadColoring(format!("class {c} is empty"))))
            .collect::<Result<Vec<_>, _>>()?;

        let mut diagonal_classes: Vec<u32> = (0..n).map(|x| color[x * n + x]).collect();
        diagonal_classes.sort_unstable();
        diagonal_classes.dedup();
        let converse = representatives.iter().map(|&(x, y)| color[y * n + x]).collect();

        let mut intersection = BTreeMap::new();
        for (k, &(x, z)) in representatives.iter().enumerate() {
            for y in 0..n {
                let key = (color[x * n + y], color[y * n + z], k as u32);
                *intersection.entry(key).or_insert(0) += 1;
            }
        }
        Ok(CoherentConfiguration {
            n,
            r,
            color,
            class_sizes,
            representatives,
            diagonal_classes,
            converse,
            intersection,
        })
    }

    /// Builds from arbitrary labels, renaming classes by first appearance in
    /// row-major order.
    pub fn from_partition<L: Copy + Ord>(n: usize, labels: &[L]) -> Result<Self, CoherentError> {
        if labels.len() != n * n {
            return Err(CoherentError::BadColoring(format!("{} entries for n = {n}", labels.len())));
        }
        let mut names = BTreeMap::new();
        let color = labels
            .iter()
            .map(|l| {
                let next = names.len() as u32;
                *names.entry(*l).or_insert(next)
            })
            .collect();
        Self::from_dense(n, color)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of classes.
    pub fn rank(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn class_of(&self, x: usize, y: usize) -> u32 {
        self.color[x * self.n + y]
    }

    pub fn colors(&self) -> &[u32] {
        &self.color
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn representative(&self, class: u32) -> (usize, usize) {
        self.representatives[class as usize]
    }

    pub fn diagonal_classes(&self) -> &[u32] {
        &self.diagonal_classes
    }

    pub fn converse(&self, class: u32) -> u32 {
        self.converse[class as usize]
    }

    /// `p_ij^k`, zero when absent.
    pub fn intersection_number(&self, i: u32, j: u32, k: u32) -> u64 {
        self.intersection.get(&(i, j, k)).copied().unwrap_or(0)
    }

    /// Non-zero intersection numbers keyed by `(i, j, k)`.
    pub fn intersection_numbers(&self) -> &BTreeMap<(u32, u32, u32), u64> {
        &self.intersection
    }

    pub fn members(&self, class: u32) -> Vec<(usize, usize)> {
        let n = self.n;
        self.color
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == class)
            .map(|(idx, _)| (idx / n, idx % n))
            .collect()
    }

    /// 0/1 characteristic matrix of one class.
    pub fn class_matrix(&self, class: u32) -> Matrix<u8> {
        Matrix::from_fn(self.n, self.n, |x, y| u8::from(self.class_of(x, y) == class))
    }

    /// Classes of vertices induced by the diagonal classes (the fibres).
    pub fn vertex_fibres(&self) -> Vec<Vec<usize>> {
        self.diagonal_classes
            .iter()
            .map(|&d| (0..self.n).filter(|&x| self.class_of(x, x) == d).collect())
            .collect()
    }

    pub fn is_discrete(&self) -> bool {
        self.r == self.n * self.n
    }

    /// Whether every class of `self` lies inside one class of `coarser`.
    pub fn refines(&self, coarser: &CoherentConfiguration) -> bool {
        if self.n != coarser.n {
            return false;
        }
        let mut image = vec![None; self.r];
        self.color.iter().zip(&coarser.color).all(|(&a, &b)| *image[a as usize].get_or_insert(b) == b)
    }

    /// Whether `m` is constant on every class, i.e. lies in the span of the
    /// characteristic matrices.
    pub fn in_coherent_algebra<T: PartialEq>(&self, m: &Matrix<T>) -> Result<bool, CoherentError> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(CoherentError::DimensionMismatch { rows: m.rows(), cols: m.cols(), n: self.n });
        }
        Ok(self.color.iter().zip(m.as_slice()).all(|(&c, v)| {
            let (x, y) = self.representatives[c as usize];
            m[(x, y)] == *v
        }))
    }

    /// Exhaustive check of the three coherent-configuration axioms.
    pub fn verify(&self) -> Result<(), AxiomViolation> {
        let n = self.n;
        // diagonal classes never leave the diagonal
        for class in 0..self.r as u32 {
            let rep = self.representatives[class as usize];
            for x in 0..n {
                for y in 0..n {
                    if self.class_of(x, y) == class && (x == y) != (rep.0 == rep.1) {
                        let (diagonal, off_diagonal) = if x == y { ((x, y), rep) } else { (rep, (x, y)) };
                        return Err(AxiomViolation::MixedDiagonal { class, diagonal, off_diagonal });
                    }
                }
            }
        }
        // the converse of each class is a single class
        for x in 0..n {
            for y in 0..n {
                let c = self.class_of(x, y);
                if self.class_of(y, x) != self.converse[c as usize] {
                    let rep = self.representatives[c as usize];
                    return Err(AxiomViolation::ConverseNotAClass { class: c, pair: (x, y), other: rep });
                }
            }
        }
        for c in 0..self.r {
            let d = self.converse[c] as usize;
            if self.converse[d] as usize != c {
                let rep = self.representatives[c];
                return Err(AxiomViolation::ConverseNotAClass { class: c as u32, pair: rep, other: rep });
            }
        }
        // intersection numbers, recounted at every witness pair
        let mut expected: Vec<Vec<((u32, u32), u64)>> = vec![Vec::new(); self.r];
        for (&(i, j, k), &p) in &self.intersection {
            expected[k as usize].push(((i, j), p));
        }
        for list in &mut expected {
            list.sort_unstable();
        }
        let mut buf: Vec<(u32, u32)> = Vec::with_capacity(n);
        let mut found: Vec<((u32, u32), u64)> = Vec::new();
        for x in 0..n {
            for z in 0..n {
                let k = self.class_of(x, z);
                buf.clear();
                buf.extend((0..n).map(|y| (self.class_of(x, y), self.class_of(y, z))));
                buf.sort_unstable();
                found.clear();
                for &key in &buf {
                    match found.last_mut() {
                        Some((last, c)) if *last == key => *c += 1,
                        _ => found.push((key, 1)),
                    }
                }
                let want = &expected[k as usize];
                if *want != found {
                    let (i, j, e, f) = first_difference(want, &found);
                    return Err(AxiomViolation::IntersectionNotConstant {
                        i,
                        j,
                        k,
                        witness: (x, z),
                        expected: e,
                        found: f,
                    });
                }
            }
        }
        Ok(())
    }

    /// Classes whose representative pair is an edge of `g`.
    pub fn edge_classes(&self, g: &Graph) -> Vec<u32> {
        (0..self.r as u32)
            .filter(|&c| {
                let (x, y) = self.representatives[c as usize];
                g.has_edge(x, y)
            })
            .collect()
    }
}

// First `(i, j)` where two sorted count lists disagree.
fn first_difference(a: &[((u32, u32), u64)], b: &[((u32, u32), u64)]) -> (u32, u32, u64, u64) {
    let lookup = |list: &[((u32, u32), u64)], key: (u32, u32)| {
        list.binary_search_by_key(&key, |e| e.0).map(|pos| list[pos].1).unwrap_or(0)
    };
    let mut keys: Vec<(u32, u32)> = a.iter().chain(b).map(|e| e.0).collect();
    keys.sort_unstable();
    for key in keys {
        let (x, y) = (lookup(a, key), lookup(b, key));
        if x != y {
            return (key.0, key.1, x, y);
        }
    }
    unreachable!("lists differ")
}

/// Class bijection between the configurations of two WL-equivalent graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceCertificate {
    /// `map[i]` is the class of `Y` matched with class `i` of `X`.
    pub map: Vec<u32>,
    /// Whether the edge classes of `X` go exactly onto those of `Y`.
    pub maps_edges_to_edges: bool,
    /// Non-zero intersection numbers compared (all others are zero on both sides).
    pub intersection_entries_checked: usize,
    /// Refinement rounds until both colourings were stable.
    pub rounds: usize,
}

impl EquivalenceCertificate {
    pub fn inverse(&self) -> Vec<u32> {
        let mut inv = vec![0; self.map.len()];
        for (i, &fi) in self.map.iter().enumerate() {
            inv[fi as usize] = i as u32;
        }
        inv
    }

    /// Re-checks the certificate against both configurations and graphs.
    pub fn verify(
        &self,
        x: &Graph,
        cx: &CoherentConfiguration,
        y: &Graph,
        cy: &CoherentConfiguration,
    ) -> Result<(), String> {
        let f = &self.map;
        if f.len() != cx.rank() || cy.rank() != cx.rank() {
            return Err(format!("class counts {} vs {}", cx.rank(), cy.rank()));
        }
        let mut hit = vec![false; f.len()];
        for &fi in f {
            if std::mem::replace(&mut hit[fi as usize], true) {
                return Err(format!("class {fi} hit twice"));
            }
        }
        for i in 0..f.len() as u32 {
            if cx.class_sizes()[i as usize] != cy.class_sizes()[f[i as usize] as usize] {
                return Err(format!("class {i} changes size"));
            }
        }
        let fd: Vec<u32> = cx.diagonal_classes().iter().map(|&d| f[d as usize]).collect();
        let mut fd_sorted = fd.clone();
        fd_sorted.sort_unstable();
        if fd_sorted != cy.diagonal_classes() {
            return Err("diagonal classes not mapped onto diagonal classes".into());
        }
        if cx.intersection_numbers().len() != cy.intersection_numbers().len() {
            return Err("different numbers of non-zero intersection numbers".into());
        }
        for (&(i, j, k), &p) in cx.intersection_numbers() {
            let q = cy.intersection_number(f[i as usize], f[j as usize], f[k as usize]);
            if p != q {
                return Err(format!("p_{i},{j}^{k} = {p} but image has {q}"));
            }
        }
        let ex = cx.edge_classes(x);
        let mut fe: Vec<u32> = ex.iter().map(|&e| f[e as usize]).collect();
        fe.sort_unstable();
        if fe != cy.edge_classes(y) {
            return Err("edge classes not mapped onto edge classes".into());
        }
        let inv = self.inverse();
        if (0..f.len()).any(|i| inv[f[i] as usize] as usize != i) {
            return Err("map does not invert".into());
        }
        Ok(())
    }
}

/// Outcome of the class-count test for circulants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CirculantVerdict {
    /// `floor(n/2) + 1` classes with `n != 4`: no quantum symmetry.
    CriterionHolds { classes: usize },
    /// The criterion does not apply; nothing is claimed either way.
    Inconclusive { classes: usize, reason: String },
}

pub fn circulant_no_quantum_symmetry(n: usize, connection_set: &[usize]) -> Result<CirculantVerdict, CoherentError> {
    let g = circulant(n, connection_set)?;
    let classes = wl_closure(&g).rank();
    let target = n / 2 + 1;
    Ok(if n == 4 {
        CirculantVerdict::Inconclusive { classes, reason: "n = 4 is excluded from the criterion".into() }
    } else if classes == target {
        CirculantVerdict::CriterionHolds { classes }
    } else {
        CirculantVerdict::Inconclusive {
            classes,
            reason: format!("{classes} classes, criterion needs {target}"),
        }
    })
}
