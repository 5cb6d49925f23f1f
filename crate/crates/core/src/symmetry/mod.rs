//! Classical automorphism groups, orbits, orbitals, the commutant of a
//! permutation group and exact Haar averages.

mod perm;
mod search;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::coherent::{wl_closure, CoherentConfiguration};
use crate::graph::Graph;
use crate::linalg::{Matrix, RationalEchelon, SparseRow};

pub use perm::{parse_generators, write_generators, Permutation, PermutationGroup, StabilizerChain, ENUMERATION_BOUND};
pub use search::{automorphism_group, automorphism_search, find_isomorphism, AutomorphismSearch, IsomorphismSearch};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error(
        "fixed points of order {0} are not supported: only orbits (1) and orbitals (2) have a known \
         quantum counterpart; whether a sensible m-th order relation exists for m >= 3 is an open problem"
    )]
    UnsupportedOrder(usize),
    #[error("internal check failed: {0}")]
    CheckFailed(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Orbits on vertices and orbitals on ordered pairs of a permutation group.
#[derive(Debug, Clone)]
pub struct OrbitalPartition {
    /// Orbits, each sorted, ordered by smallest member.
    pub orbits: Vec<Vec<usize>>,
    /// Index into `orbits` for every vertex.
    pub orbit_of: Vec<usize>,
    /// Orbitals as a configuration; class ids follow first appearance in
    /// row-major order.
    pub orbitals: CoherentConfiguration,
}

pub fn orbits(g: &PermutationGroup) -> Vec<Vec<usize>> {
    let n = g.degree();
    let mut uf = UnionFind::new(n);
    for s in g.generators() {
        for x in 0..n {
            uf.union(x, s.apply(x));
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for x in 0..n {
        let r = uf.find(x);
        if index[r] == usize::MAX {
            index[r] = out.len();
            out.push(Vec::new());
        }
        out[index[r]].push(x);
    }
    out
}

pub fn orbitals(g: &PermutationGroup) -> OrbitalPartition {
    let n = g.degree();
    let mut uf = UnionFind::new(n * n);
    for s in g.generators() {
        for x in 0..n {
            for y in 0..n {
                uf.union(x * n + y, s.apply(x) * n + s.apply(y));
            }
        }
    }
    let labels: Vec<usize> = (0..n * n).map(|p| uf.find(p)).collect();
    let orbitals = CoherentConfiguration::from_partition(n, &labels).expect("n*n labels");
    let orbits = orbits(g);
    let mut orbit_of = vec![0; n];
    for (i, o) in orbits.iter().enumerate() {
        for &x in o {
            orbit_of[x] = i;
        }
    }
    OrbitalPartition { orbits, orbit_of, orbitals }
}

pub fn is_vertex_transitive(x: &Graph) -> bool {
    orbits(&automorphism_group(x)).len() == 1
}

/// All ordered adjacent pairs in one orbital. An edgeless graph is
/// vacuously arc transitive.
pub fn is_arc_transitive(x: &Graph) -> bool {
    let part = orbitals(&automorphism_group(x));
    let mut classes = x.edges().iter().flat_map(|&(u, v)| [part.orbitals.class_of(u, v), part.orbitals.class_of(v, u)]);
    match classes.next() {
        None => true,
        Some(c) => classes.all(|d| d == c),
    }
}

/// Whether `M_{s(i), s(j)} = M_{i, j}` for every generator `s`, i.e.
/// `M P_s = P_s M`.
pub fn commutes_with_group<T: PartialEq>(g: &PermutationGroup, m: &Matrix<T>) -> Result<bool, SymmetryError> {
    let n = g.degree();
    if m.rows() != n || m.cols() != n {
        return Err(SymmetryError::SizeMismatch { expected: n, found: m.rows().max(m.cols()) });
    }
    Ok(g.generators().iter().all(|s| (0..n).all(|i| (0..n).all(|j| m[(s.apply(i), s.apply(j))] == m[(i, j)]))))
}

/// Characteristic matrices of the orbitals, each checked to commute with
/// every generator.
pub fn commutant_basis(g: &PermutationGroup) -> Result<Vec<Matrix<u8>>, SymmetryError> {
    let part = orbitals(g);
    let basis: Vec<Matrix<u8>> = (0..part.orbitals.rank() as u32).map(|c| part.orbitals.class_matrix(c)).collect();
    for (c, m) in basis.iter().enumerate() {
        if !commutes_with_group(g, m)? {
            return Err(SymmetryError::CheckFailed(format!("orbital {c} does not commute")));
        }
    }
    Ok(basis)
}

/// Solution space of `M P_s = P_s M` over the generators, solved exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutantReport {
    pub dimension: usize,
    pub orbitals: usize,
    /// Every orbital matrix solves the system.
    pub orbital_matrices_solve: bool,
}

impl CommutantReport {
    /// The orbital matrices have disjoint non-empty supports, hence are
    /// independent; with matching dimension they form a basis.
    pub fn orbitals_form_basis(&self) -> bool {
        self.orbital_matrices_solve && self.dimension == self.orbitals
    }
}

pub fn commutant_report(g: &PermutationGroup) -> CommutantReport {
    let n = g.degree();
    let mut system = RationalEchelon::new(n * n);
    let one = BigRational::one();
    for s in g.generators() {
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (s.apply(i) * n + s.apply(j), i * n + j);
                if a != b {
                    let row: SparseRow = [(a, one.clone()), (b, -one.clone())].into_iter().collect();
                    system.push(row);
                }
            }
        }
    }
    let part = orbitals(g);
    let orbital_matrices_solve = (0..part.orbitals.rank() as u32).all(|c| {
        let v: Vec<BigRational> = part
            .orbitals
            .colors()
            .iter()
            .map(|&k| if k == c { BigRational::one() } else { BigRational::zero() })
            .collect();
        system.satisfies(&v)
    });
    CommutantReport { dimension: system.nullity(), orbitals: part.orbitals.rank(), orbital_matrices_solve }
}

/// Indicator vectors of orbits (`m = 1`, length `n`) or orbitals (`m = 2`,
/// length `n^2`, row-major), each checked invariant under the generators.
pub fn fixed_point_basis(g: &PermutationGroup, m: usize) -> Result<Vec<Vec<u8>>, SymmetryError> {
    let n = g.degree();
    let vectors: Vec<Vec<u8>> = match m {
        1 => orbits(g)
            .iter()
            .map(|o| {
                let mut v = vec![0; n];
                for &x in o {
                    v[x] = 1;
                }
                v
            })
            .collect(),
        2 => {
            let part = orbitals(g);
            (0..part.orbitals.rank() as u32)
                .map(|c| part.orbitals.colors().iter().map(|&k| u8::from(k == c)).collect())
                .collect()
        }
        _ => return Err(SymmetryError::UnsupportedOrder(m)),
    };
    for s in g.generators() {
        for v in &vectors {
            let invariant = if m == 1 {
                (0..n).all(|x| v[s.apply(x)] == v[x])
            } else {
                (0..n * n).all(|p| v[s.apply(p / n) * n + s.apply(p % n)] == v[p])
            };
            if !invariant {
                return Err(SymmetryError::CheckFailed("fixed vector moved by a generator".into()));
            }
        }
    }
    Ok(vectors)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum HaarCheck {
    /// Explicit averaging over every element agreed on all pairs.
    Verified { group_order: u64 },
    /// Group larger than [`ENUMERATION_BOUND`]; values come from the
    /// orbital formula alone.
    Skipped { group_order: String },
}

/// Haar averages of `u_{xy} u_{x'y'}` (per orbital) and `u_{xy}` (per orbit).
#[derive(Debug, Clone)]
pub struct HaarValues {
    pub partition: OrbitalPartition,
    /// `1 / |R_i|` indexed by orbital class.
    pub orbital_values: Vec<BigRational>,
    /// `1 / |O_i|` indexed by orbit.
    pub orbit_values: Vec<BigRational>,
    pub check: HaarCheck,
}

impl HaarValues {
    /// Average of `[s(x) = y][s(x') = y']` over the group.
    pub fn pair_value(&self, (x, xp): (usize, usize), (y, yp): (usize, usize)) -> BigRational {
        let c = &self.partition.orbitals;
        let k = c.class_of(x, xp);
        if k == c.class_of(y, yp) {
            self.orbital_values[k as usize].clone()
        } else {
            BigRational::zero()
        }
    }

    /// Average of `[s(x) = y]` over the group.
    pub fn vertex_value(&self, x: usize, y: usize) -> BigRational {
        let o = self.partition.orbit_of[x];
        if o == self.partition.orbit_of[y] {
            self.orbit_values[o].clone()
        } else {
            BigRational::zero()
        }
    }
}

fn recip(k: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(k))
}

pub fn haar_values(x: &Graph) -> Result<HaarValues, SymmetryError> {
    haar_values_for(&automorphism_group(x))
}

pub fn haar_values_for(g: &PermutationGroup) -> Result<HaarValues, SymmetryError> {
    let n = g.degree();
    let partition = orbitals(g);
    let orbital_values = partition.orbitals.class_sizes().iter().map(|&s| recip(s)).collect();
    let orbit_values = partition.orbits.iter().map(|o| recip(o.len())).collect();
    let mut values = HaarValues { partition, orbital_values, orbit_values, check: HaarCheck::Skipped { group_order: String::new() } };
    let order = g.order();
    let Some(elements) = g.elements() else {
        values.check = HaarCheck::Skipped { group_order: order.to_string() };
        return Ok(values);
    };
    let size = BigInt::from(elements.len());
    let mut counts = vec![0u64; n * n];
    for src in 0..n * n {
        counts.iter_mut().for_each(|c| *c = 0);
        let (a, b) = (src / n, src % n);
        for s in &elements {
            counts[s.apply(a) * n + s.apply(b)] += 1;
        }
        for (dst, &c) in counts.iter().enumerate() {
            let avg = BigRational::new(BigInt::from(c), size.clone());
            if avg != values.pair_value((a, b), (dst / n, dst % n)) {
                return Err(SymmetryError::CheckFailed(format!(
                    "average over the group at ({a},{b}) -> ({},{}) is {avg}",
                    dst / n,
                    dst % n
                )));
            }
            // the diagonal pair (a, a) -> (y, y) is the vertex average
            if a == b && dst / n == dst % n && avg != values.vertex_value(a, dst / n) {
                return Err(SymmetryError::CheckFailed(format!("vertex average at {a} -> {}", dst / n)));
            }
        }
    }
    let group_order = u64::try_from(&order).expect("within the enumeration bound");
    values.check = HaarCheck::Verified { group_order };
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapVerdict {
    Tight,
    Gap,
}

/// A WL class that splits into several orbitals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitClass {
    pub wl_class: u32,
    pub orbitals: Vec<u32>,
    pub diagonal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub wl_classes: usize,
    pub orbital_classes: usize,
    pub wl_fibres: usize,
    pub orbits: usize,
    pub group_order: String,
    /// Orbitals refine the WL classes (always expected).
    pub refines: bool,
    pub split: Vec<SplitClass>,
    pub verdict: GapVerdict,
}

/// Compares the WL configuration with the orbital configuration of `Aut(x)`.
pub fn configuration_gap(x: &Graph) -> GapReport {
    let wl = wl_closure(x);
    let group = automorphism_group(x);
    let part = orbitals(&group);
    let orb = &part.orbitals;
    let refines = orb.refines(&wl);
    let mut per_class: Vec<Vec<u32>> = vec![Vec::new(); wl.rank()];
    for (&w, &o) in wl.colors().iter().zip(orb.colors()) {
        per_class[w as usize].push(o);
    }
    let split = per_class
        .into_iter()
        .enumerate()
        .filter_map(|(w, mut os)| {
            os.sort_unstable();
            os.dedup();
            let (a, b) = wl.representative(w as u32);
            (os.len() > 1).then_some(SplitClass { wl_class: w as u32, orbitals: os, diagonal: a == b })
        })
        .collect::<Vec<_>>();
    let verdict = if refines && orb.rank() == wl.rank() { GapVerdict::Tight } else { GapVerdict::Gap };
    GapReport {
        wl_classes: wl.rank(),
        orbital_classes: orb.rank(),
        wl_fibres: wl.diagonal_classes().len(),
        orbits: part.orbits.len(),
        group_order: group.order().to_string(),
        refines,
        split,
        verdict,
    }
}
