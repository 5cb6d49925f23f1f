//! Linear binary constraint systems over GF(2), their game graphs and the
//! graph-to-LBCS reduction whose quantum satisfiability is decided by
//! planarity.

mod gf2;
mod io;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};

pub use gf2::{BitVec, Elimination};
pub use io::{parse_lbcs, write_lbcs};

/// Largest support for which local assignments are enumerated.
pub const MAX_SUPPORT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LbcsError {
    #[error("constraint {0} has an empty support")]
    EmptySupport(usize),
    #[error("constraint {constraint} uses variable {var}, but there are only {n_vars}")]
    VariableOutOfRange { constraint: usize, var: usize, n_vars: usize },
    #[error("constraint {constraint} repeats variable {var}")]
    DuplicateVariable { constraint: usize, var: usize },
    #[error("constraint {constraint} has {size} variables; at most {MAX_SUPPORT} are enumerated")]
    SupportTooLarge { constraint: usize, size: usize },
    #[error("assignment has {found} bits, system has {expected} variables")]
    AssignmentLength { expected: usize, found: usize },
    #[error("marked vertex {0} is out of range")]
    MarkedOutOfRange(usize),
    #[error("marked vertex {0} is isolated")]
    IsolatedMarked(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// `sum_{i in support} x_i = rhs` over GF(2).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Constraint {
    pub support: Vec<usize>,
    pub rhs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Lbcs {
    n_vars: usize,
    constraints: Vec<Constraint>,
}

impl Lbcs {
    /// Supports are sorted; they must be non-empty, in range and free of
    /// repeats.
    pub fn new(n_vars: usize, constraints: impl IntoIterator<Item = (Vec<usize>, bool)>) -> Result<Self, LbcsError> {
        let mut out = Vec::new();
        for (idx, (mut support, rhs)) in constraints.into_iter().enumerate() {
            if support.is_empty() {
                return Err(LbcsError::EmptySupport(idx));
            }
            support.sort_unstable();
            if let Some(&var) = support.iter().find(|&&v| v >= n_vars) {
                return Err(LbcsError::VariableOutOfRange { constraint: idx, var, n_vars });
            }
            if let Some(w) = support.windows(2).find(|w| w[0] == w[1]) {
                return Err(LbcsError::DuplicateVariable { constraint: idx, var: w[0] });
            }
            out.push(Constraint { support, rhs });
        }
        Ok(Lbcs { n_vars, constraints: out })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    fn row(&self, c: &Constraint) -> BitVec {
        BitVec::from_indices(self.n_vars, c.support.iter().copied())
    }

    fn eliminate(&self) -> Elimination {
        let mut e = Elimination::new(self.n_vars, self.constraints.len());
        for (i, c) in self.constraints.iter().enumerate() {
            e.push(i, self.row(c), c.rhs);
        }
        e
    }

    /// Index of the first violated constraint, if any.
    pub fn first_violation(&self, a: &Assignment) -> Result<Option<usize>, LbcsError> {
        if a.len() != self.n_vars {
            return Err(LbcsError::AssignmentLength { expected: self.n_vars, found: a.len() });
        }
        Ok(self.constraints.iter().position(|c| c.support.iter().fold(false, |acc, &i| acc ^ a.get(i)) != c.rhs))
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> Result<bool, LbcsError> {
        Ok(self.first_violation(a)?.is_none())
    }
}

/// A value in GF(2) for every variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(BitVec);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment(BitVec::zeros(n))
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Assignment(BitVec::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0.get(i)
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.0.len()).map(|i| self.0.get(i)).collect()
    }

    pub fn as_bitvec(&self) -> &BitVec {
        &self.0
    }
}

/// A set of constraints whose supports cancel while their right-hand
/// sides sum to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InconsistencyProof {
    pub constraints: Vec<usize>,
}

impl InconsistencyProof {
    pub fn verify(&self, f: &Lbcs) -> bool {
        let mut sum = BitVec::zeros(f.n_vars);
        let mut rhs = false;
        for &i in &self.constraints {
            let Some(c) = f.constraints.get(i) else { return false };
            sum.xor_assign(&f.row(c));
            rhs ^= c.rhs;
        }
        sum.is_zero() && rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfiability {
    Satisfiable(Assignment),
    Unsatisfiable(InconsistencyProof),
}

impl Satisfiability {
    pub fn assignment(&self) -> Option<&Assignment> {
        match self {
            Satisfiability::Satisfiable(a) => Some(a),
            Satisfiability::Unsatisfiable(_) => None,
        }
    }
}

pub fn classical_satisfiable(f: &Lbcs) -> Satisfiability {
    let e = f.eliminate();
    match e.inconsistency() {
        Some(combo) => Satisfiability::Unsatisfiable(InconsistencyProof { constraints: combo.ones().collect() }),
        None => Satisfiability::Satisfiable(Assignment(e.particular().expect("consistent system"))),
    }
}

pub fn homogenize(f: &Lbcs) -> Lbcs {
    Lbcs {
        n_vars: f.n_vars,
        constraints: f.constraints.iter().map(|c| Constraint { support: c.support.clone(), rhs: false }).collect(),
    }
}

pub fn rhs_parity(f: &Lbcs) -> bool {
    f.constraints.iter().fold(false, |acc, c| acc ^ c.rhs)
}

/// Homogeneous solutions and, when consistent, one particular solution.
#[derive(Debug, Clone)]
pub struct SolutionSpace {
    pub rank: usize,
    pub kernel_basis: Vec<Assignment>,
    pub particular: Option<Assignment>,
}

impl SolutionSpace {
    pub fn kernel_dimension(&self) -> usize {
        self.kernel_basis.len()
    }
}

pub fn solution_space(f: &Lbcs) -> SolutionSpace {
    let e = f.eliminate();
    SolutionSpace {
        rank: e.rank(),
        kernel_basis: e.kernel_basis().into_iter().map(Assignment).collect(),
        particular: e.particular().map(Assignment),
    }
}

/// A vertex of a game graph: a constraint and a satisfying assignment of
/// its support, bit `t` of `local` belonging to `support[t]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GameVertex {
    pub constraint: usize,
    pub local: Vec<bool>,
}

impl GameVertex {
    pub fn label(&self) -> String {
        let bits: String = self.local.iter().map(|&b| if b { '1' } else { '0' }).collect();
        format!("{}:{}", self.constraint, bits)
    }
}

/// Vertices of the game graph in order: constraints in input order, local
/// assignments in increasing binary order with the first support variable
/// most significant.
pub fn game_vertices(f: &Lbcs) -> Result<Vec<GameVertex>, LbcsError> {
    let mut out = Vec::new();
    for (l, c) in f.constraints.iter().enumerate() {
        let k = c.support.len();
        if k > MAX_SUPPORT {
            return Err(LbcsError::SupportTooLarge { constraint: l, size: k });
        }
        for v in 0u32..1 << k {
            if (v.count_ones() % 2 == 1) == c.rhs {
                let local = (0..k).map(|t| v >> (k - 1 - t) & 1 == 1).collect();
                out.push(GameVertex { constraint: l, local });
            }
        }
    }
    Ok(out)
}

/// Whether two local assignments disagree on a shared variable.
fn inconsistent(f: &Lbcs, a: &GameVertex, b: &GameVertex) -> bool {
    let (sa, sb) = (&f.constraints[a.constraint].support, &f.constraints[b.constraint].support);
    let (mut i, mut j) = (0, 0);
    while i < sa.len() && j < sb.len() {
        match sa[i].cmp(&sb[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a.local[i] != b.local[j] {
                    return true;
                }
                i += 1;
                j += 1;
            }
        }
    }
    false
}

/// Game graph: vertices from [`game_vertices`], labelled `constraint:bits`;
/// edges join inconsistent vertices. Vertices of one constraint form a
/// clique when `include_clique_edges` is set and are independent otherwise.
pub fn game_graph(f: &Lbcs, include_clique_edges: bool) -> Result<Graph, LbcsError> {
    let vs = game_vertices(f)?;
    let mut edges = Vec::new();
    for a in 0..vs.len() {
        for b in a + 1..vs.len() {
            let adjacent = if vs[a].constraint == vs[b].constraint {
                include_clique_edges
            } else {
                inconsistent(f, &vs[a], &vs[b])
            };
            if adjacent {
                edges.push((a, b));
            }
        }
    }
    let g = Graph::new(vs.len(), edges)?;
    Ok(g.with_labels(vs.iter().map(GameVertex::label).collect())?)
}

/// One variable per edge of `z` (in sorted edge order), one constraint per
/// vertex over its incident edges; right-hand side 1 at `marked` only.
pub fn arkhipov_lbcs(z: &Graph, marked: usize) -> Result<Lbcs, LbcsError> {
    if marked >= z.n() {
        return Err(LbcsError::MarkedOutOfRange(marked));
    }
    if z.degree(marked) == 0 {
        return Err(LbcsError::IsolatedMarked(marked));
    }
    if !z.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    let constraints = (0..z.n()).map(|v| {
        let support: Vec<usize> = z.neighbors(v).iter().map(|&w| z.edge_index(v, w).unwrap()).collect();
        (support, v == marked)
    });
    Lbcs::new(z.edge_count(), constraints)
}

/// The magic-square system: variables `x1..x9` (indices 0..8) in a 3x3
/// grid, row constraints then column constraints, odd parity on the last
/// column only.
pub fn magic_square_lbcs() -> Lbcs {
    let rows = (0..3).map(|r| (vec![3 * r, 3 * r + 1, 3 * r + 2], false));
    let cols = (0..3).map(|c| (vec![c, c + 3, c + 6], c == 2));
    Lbcs::new(9, rows.chain(cols)).expect("fixed system is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuantumVerdict {
    QuantumSat,
    QuantumUnsat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArkhipovVerdict {
    pub verdict: QuantumVerdict,
    pub planar: bool,
    pub note: &'static str,
}

const ARKHIPOV_NOTE: &str = "Arkhipov's theorem: the single-marked parity system of a connected graph has an \
     operator solution iff the graph is non-planar; when it exists, one exists in even dimension at most 8";

/// Quantum satisfiability of the single-marked system of `z`, decided by
/// planarity. The verdict does not depend on the marked vertex.
pub fn quantum_satisfiable_verdict(z: &Graph) -> Result<ArkhipovVerdict, LbcsError> {
    if !z.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    let planar = z.is_planar();
    let verdict = if planar { QuantumVerdict::QuantumUnsat } else { QuantumVerdict::QuantumSat };
    Ok(ArkhipovVerdict { verdict, planar, note: ARKHIPOV_NOTE })
}
