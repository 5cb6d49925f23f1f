//! Small dense matrices and exact rational row reduction.

use std::collections::BTreeMap;
use std::ops::{Index, IndexMut};

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Row-major dense matrix over any element type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }
}

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Clone + Zero + std::ops::Mul<Output = T>> Matrix<T> {
    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = Matrix::filled(self.rows, other.cols, T::zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.data[i * other.cols + j].clone() + a.clone() * other[(k, j)].clone();
                    out.data[i * other.cols + j] = v;
                }
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

/// Sparse row over the rationals, keyed by column.
pub type SparseRow = BTreeMap<usize, BigRational>;

/// Incremental reduced row-echelon form of a homogeneous system over Q.
///
/// Rows are kept fully reduced: every pivot column is zero in every other
/// stored row.
#[derive(Debug, Clone)]
pub struct RationalEchelon {
    n_vars: usize,
    // pivot column -> row with a 1 in that column
    rows: BTreeMap<usize, SparseRow>,
}

impl RationalEchelon {
    pub fn new(n_vars: usize) -> Self {
        RationalEchelon { n_vars, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn nullity(&self) -> usize {
        self.n_vars - self.rows.len()
    }

    fn reduce(&self, mut row: SparseRow) -> SparseRow {
        // pivots only ever shrink the support to non-pivot columns, so one
        // pass over the pivots present in the row suffices
        let pivots: Vec<usize> = row.keys().copied().filter(|c| self.rows.contains_key(c)).collect();
        for c in pivots {
            let Some(coef) = row.get(&c).cloned() else { continue };
            for (col, v) in &self.rows[&c] {
                let entry = row.entry(*col).or_insert_with(BigRational::zero);
                *entry -= &coef * v;
                if entry.is_zero() {
                    row.remove(col);
                }
            }
        }
        row
    }

    /// Adds an equation `sum row[c] * x_c = 0`. Returns whether the rank grew.
    pub fn push(&mut self, row: SparseRow) -> bool {
        let row: SparseRow = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let mut row = self.reduce(row);
        let Some((&pivot, lead)) = row.iter().next() else { return false };
        let inv = lead.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        for other in self.rows.values_mut() {
            if let Some(coef) = other.get(&pivot).cloned() {
                for (col, v) in &row {
                    let entry = other.entry(*col).or_insert_with(BigRational::zero);
                    *entry -= &coef * v;
                    if entry.is_zero() {
                        other.remove(col);
                    }
                }
            }
        }
        self.rows.insert(pivot, row);
        true
    }

    /// Whether `x` satisfies every stored equation.
    pub fn satisfies(&self, x: &[BigRational]) -> bool {
        self.rows.values().all(|row| {
            let mut acc = BigRational::zero();
            for (c, v) in row {
                acc += v * &x[*c];
            }
            acc.is_zero()
        })
    }

    /// One basis vector per free column, with that column set to 1.
    pub fn nullspace_basis(&self) -> Vec<Vec<BigRational>> {
        let free: Vec<usize> = (0..self.n_vars).filter(|c| !self.rows.contains_key(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.n_vars];
                v[f] = BigRational::one();
                for (&p, row) in &self.rows {
                    if let Some(coef) = row.get(&f) {
                        v[p] = -coef.clone();
                    }
                }
                v
            })
            .collect()
    }
}
