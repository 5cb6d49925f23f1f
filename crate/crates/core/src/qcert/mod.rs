//! Numerical checks for finite-dimensional quantum certificates: magic
//! unitaries between graphs and operator solutions of binary constraint
//! systems.
//!
//! Every residual is a maximum absolute entry.

mod io;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::lbcs::Lbcs;
use crate::symmetry::Permutation;

pub use io::{parse_magic_unitary, parse_operator_solution, write_magic_unitary, write_operator_solution};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcertError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("graphs have {x} and {y} vertices, certificate has n = {n}")]
    SizeMismatch { x: usize, y: usize, n: usize },
    #[error("candidate is not a magic unitary: {0}")]
    NotMagicUnitary(String),
    #[error("permutation is not an isomorphism between the given graphs")]
    NotAnIsomorphism,
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, c| acc.max(c.norm()))
}

fn check_tol(tol: f64) -> Result<(), QcertError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(QcertError::Tolerance(tol))
    }
}

fn check_square(m: &ComplexMatrix, d: usize, what: impl Fn() -> String) -> Result<(), QcertError> {
    if m.nrows() != d || m.ncols() != d {
        return Err(QcertError::Dimension(format!("{} is {}x{}, expected {d}x{d}", what(), m.nrows(), m.ncols())));
    }
    if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(QcertError::NonFinite(what()));
    }
    Ok(())
}

/// An `n x n` array of `d x d` blocks, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MagicUnitaryCandidate {
    n: usize,
    d: usize,
    blocks: Vec<ComplexMatrix>,
}

impl MagicUnitaryCandidate {
    pub fn new(n: usize, d: usize, blocks: Vec<ComplexMatrix>) -> Result<Self, QcertError> {
        if n == 0 || d == 0 {
            return Err(QcertError::Dimension(format!("n = {n} and d = {d} must be positive")));
        }
        if blocks.len() != n * n {
            return Err(QcertError::Dimension(format!("{} blocks, expected {}", blocks.len(), n * n)));
        }
        for (i, b) in blocks.iter().enumerate() {
            check_square(b, d, || format!("block ({}, {})", i / n, i % n))?;
        }
        Ok(Self { n, d, blocks })
    }

    /// `u[x][σ(x)] = 1`, everything else zero.
    pub fn from_permutation(sigma: &Permutation) -> Self {
        let n = sigma.degree();
        let blocks = (0..n * n)
            .map(|i| {
                let v = if sigma.apply(i / n) == i % n { 1.0 } else { 0.0 };
                ComplexMatrix::from_element(1, 1, Complex64::new(v, 0.0))
            })
            .collect();
        Self { n, d: 1, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn block(&self, x: usize, y: usize) -> &ComplexMatrix {
        &self.blocks[x * self.n + y]
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// The full `nd x nd` matrix.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let (n, d) = (self.n, self.d);
        let mut m = ComplexMatrix::zeros(n * d, n * d);
        for x in 0..n {
            for y in 0..n {
                m.view_mut((x * d, y * d), (d, d)).copy_from(self.block(x, y));
            }
        }
        m
    }

    /// Replaces every block `p` by `w p w*`.
    pub fn conjugated(&self, w: &ComplexMatrix) -> Result<Self, QcertError> {
        check_square(w, self.d, || "conjugating matrix".into())?;
        let wa = w.adjoint();
        let blocks = self.blocks.iter().map(|b| w * b * &wa).collect();
        Ok(Self { n: self.n, d: self.d, blocks })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagicUnitaryReport {
    pub hermitian: f64,
    pub idempotent: f64,
    pub row_sum: f64,
    pub col_sum: f64,
    /// `max(|UU* - I|, |U*U - I|)`; implied by the other four, not part of
    /// the verdict.
    pub unitarity: f64,
    pub tol: f64,
    pub passed: bool,
}

impl MagicUnitaryReport {
    fn worst(&self) -> f64 {
        self.hermitian.max(self.idempotent).max(self.row_sum).max(self.col_sum)
    }
}

pub fn check_magic_unitary(u: &MagicUnitaryCandidate, tol: f64) -> Result<MagicUnitaryReport, QcertError> {
    check_tol(tol)?;
    let (n, d) = (u.n, u.d);
    let id = ComplexMatrix::identity(d, d);
    let (hermitian, idempotent) = u
        .blocks
        .par_iter()
        .map(|p| (max_abs(&(p - p.adjoint())), max_abs(&(p * p - p))))
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let line_sum = |by_row: bool| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let s = (0..n).fold(ComplexMatrix::zeros(d, d), |acc, j| {
                    acc + if by_row { u.block(i, j) } else { u.block(j, i) }
                });
                max_abs(&(s - &id))
            })
            .reduce(|| 0.0, f64::max)
    };
    let (row_sum, col_sum) = (line_sum(true), line_sum(false));
    let full = u.to_matrix();
    let big_id = ComplexMatrix::identity(n * d, n * d);
    let fa = full.adjoint();
    let unitarity = max_abs(&(&full * &fa - &big_id)).max(max_abs(&(&fa * &full - &big_id)));
    let mut report = MagicUnitaryReport { hermitian, idempotent, row_sum, col_sum, unitarity, tol, passed: false };
    report.passed = report.worst() <= tol;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumIsomorphismReport {
    pub magic: MagicUnitaryReport,
    /// `|AU - UB|` with `A` and `B` inflated to `A ⊗ I_d` and `B ⊗ I_d`.
    pub intertwining: f64,
    /// Largest `|u_xy u_x'y'|` over quadruples with `rel(x, x') != rel(y, y')`.
    pub orthogonality: f64,
    pub tol: f64,
    pub passed: bool,
    /// One formulation passes while the other exceeds `10 * tol`.
    pub inconsistent: bool,
}

pub fn check_quantum_isomorphism(
    x: &Graph,
    y: &Graph,
    u: &MagicUnitaryCandidate,
    tol: f64,
) -> Result<QuantumIsomorphismReport, QcertError> {
    let n = u.n;
    if x.n() != n || y.n() != n {
        return Err(QcertError::SizeMismatch { x: x.n(), y: y.n(), n });
    }
    let magic = check_magic_unitary(u, tol)?;
    if !magic.passed {
        return Err(QcertError::NotMagicUnitary(format!("largest residual {:.3e} exceeds {tol:.1e}", magic.worst())));
    }
    let d = u.d;
    let intertwining = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (i / n, i % n);
            let mut acc = ComplexMatrix::zeros(d, d);
            for &z in x.neighbors(a) {
                acc += u.block(z, b);
            }
            for &z in y.neighbors(b) {
                acc -= u.block(a, z);
            }
            max_abs(&acc)
        })
        .reduce(|| 0.0, f64::max);
    let nonzero: Vec<bool> = u.blocks.iter().map(|b| max_abs(b) > 0.0).collect();
    let orthogonality = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (i / n, i % n);
            if !nonzero[i] {
                return 0.0;
            }
            let mut worst: f64 = 0.0;
            for a2 in 0..n {
                for b2 in 0..n {
                    if nonzero[a2 * n + b2] && x.rel(a, a2) != y.rel(b, b2) {
                        worst = worst.max(max_abs(&(u.block(a, b) * u.block(a2, b2))));
                    }
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let passed = intertwining <= tol && orthogonality <= tol;
    let inconsistent = (intertwining <= tol && orthogonality > 10.0 * tol) || (orthogonality <= tol && intertwining > 10.0 * tol);
    Ok(QuantumIsomorphismReport { magic, intertwining, orthogonality, tol, passed, inconsistent })
}

/// The perfect classical strategy `x -> σ(x)` as a `1 x 1`-block certificate.
pub fn classical_strategy_as_certificate(
    sigma: &Permutation,
    x: &Graph,
    y: &Graph,
) -> Result<MagicUnitaryCandidate, QcertError> {
    if !sigma.is_isomorphism(x, y) {
        return Err(QcertError::NotAnIsomorphism);
    }
    Ok(MagicUnitaryCandidate::from_permutation(sigma))
}

/// One `d x d` operator per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSolutionCandidate {
    d: usize,
    vars: Vec<ComplexMatrix>,
}

impl OperatorSolutionCandidate {
    pub fn new(d: usize, vars: Vec<ComplexMatrix>) -> Result<Self, QcertError> {
        if d == 0 {
            return Err(QcertError::Dimension("d must be positive".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            check_square(v, d, || format!("operator {i}"))?;
        }
        Ok(Self { d, vars })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vars(&self) -> &[ComplexMatrix] {
        &self.vars
    }

    /// `±1` scalars as `1 x 1` operators; `true` is `-1`.
    pub fn from_scalars(bits: &[bool]) -> Self {
        let vars = bits
            .iter()
            .map(|&b| ComplexMatrix::from_element(1, 1, Complex64::new(if b { -1.0 } else { 1.0 }, 0.0)))
            .collect();
        Self { d: 1, vars }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSolutionReport {
    pub involution: f64,
    pub self_adjoint: f64,
    /// Per constraint, the largest pairwise commutator.
    pub commutation: Vec<f64>,
    /// Per constraint, `|prod - (-1)^b I|` with the product taken in
    /// ascending variable order.
    pub product: Vec<f64>,
    pub tol: f64,
    pub passed: bool,
}

impl OperatorSolutionReport {
    pub fn max_residual(&self) -> f64 {
        self.commutation
            .iter()
            .chain(&self.product)
            .fold(self.involution.max(self.self_adjoint), |a, &b| a.max(b))
    }

    pub fn first_failing_product(&self) -> Option<usize> {
        self.product.iter().position(|&r| r > self.tol)
    }
}

pub fn check_operator_solution(
    f: &Lbcs,
    s: &OperatorSolutionCandidate,
    tol: f64,
) -> Result<OperatorSolutionReport, QcertError> {
    check_tol(tol)?;
    if s.vars.len() != f.n_vars() {
        return Err(QcertError::Dimension(format!("{} operators for {} variables", s.vars.len(), f.n_vars())));
    }
    let id = ComplexMatrix::identity(s.d, s.d);
    let (involution, self_adjoint) = s
        .vars
        .par_iter()
        .map(|v| (max_abs(&(v * v - &id)), max_abs(&(v - v.adjoint()))))
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let per: Vec<(f64, f64)> = f
        .constraints()
        .par_iter()
        .map(|c| {
            let mut comm: f64 = 0.0;
            for (k, &i) in c.support.iter().enumerate() {
                for &j in &c.support[k + 1..] {
                    let (a, b) = (&s.vars[i], &s.vars[j]);
                    comm = comm.max(max_abs(&(a * b - b * a)));
                }
            }
            let prod = c.support.iter().fold(id.clone(), |acc, &i| acc * &s.vars[i]);
            let sign = if c.rhs { -1.0 } else { 1.0 };
            (comm, max_abs(&(prod - &id * Complex64::new(sign, 0.0))))
        })
        .collect();
    let (commutation, product): (Vec<f64>, Vec<f64>) = per.into_iter().unzip();
    let mut report = OperatorSolutionReport { involution, self_adjoint, commutation, product, tol, passed: false };
    report.passed = report.max_residual() <= tol;
    Ok(report)
}

fn pauli(which: char) -> ComplexMatrix {
    let (o, l, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    let entries = match which {
        'I' => [l, o, o, l],
        'X' => [o, l, l, o],
        'Y' => [o, -i, i, o],
        'Z' => [l, o, o, -l],
        _ => unreachable!(),
    };
    ComplexMatrix::from_row_slice(2, 2, &entries)
}

/// Two-qubit Pauli operators for the magic-square system, in its variable
/// order: `XI IX XX / IZ ZI ZZ / XZ ZX YY`.
pub fn mermin_peres_solution() -> OperatorSolutionCandidate {
    let grid = ["XI", "IX", "XX", "IZ", "ZI", "ZZ", "XZ", "ZX", "YY"];
    let vars = grid
        .iter()
        .map(|w| {
            let mut c = w.chars();
            pauli(c.next().unwrap()).kronecker(&pauli(c.next().unwrap()))
        })
        .collect();
    let s = OperatorSolutionCandidate { d: 4, vars };
    let report = check_operator_solution(&crate::lbcs::magic_square_lbcs(), &s, 1e-12).expect("aligned dimensions");
    assert!(report.passed, "Pauli solution failed its own check: {report:?}");
    s
}

/// The four-vertex magic unitary built from two projectors `a` and `b`:
/// `[[a, 1-a, 0, 0], [1-a, a, 0, 0], [0, 0, b, 1-b], [0, 0, 1-b, b]]`.
pub fn two_projector_magic_unitary(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<MagicUnitaryCandidate, QcertError> {
    let d = a.nrows();
    check_square(a, d, || "a".into())?;
    check_square(b, d, || "b".into())?;
    let id = ComplexMatrix::identity(d, d);
    let zero = ComplexMatrix::zeros(d, d);
    let (ca, cb) = (&id - a, &id - b);
    let blocks = vec![
        a.clone(), ca.clone(), zero.clone(), zero.clone(),
        ca, a.clone(), zero.clone(), zero.clone(),
        zero.clone(), zero.clone(), b.clone(), cb.clone(),
        zero.clone(), zero, cb, b.clone(),
    ];
    MagicUnitaryCandidate::new(4, d, blocks)
}

/// Rank-one projector onto `(cos θ, sin θ)`.
pub fn line_projector(theta: f64) -> ComplexMatrix {
    let v = nalgebra::DVector::from_vec(vec![Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0)]);
    &v * v.adjoint()
}

/// A random `d x d` unitary: the QR factor of a complex Gaussian matrix,
/// with the phases of `R`'s diagonal absorbed.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / rjj.norm();
            q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    q
}
