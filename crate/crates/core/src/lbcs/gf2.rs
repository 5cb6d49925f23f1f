//! Bit-packed vectors and incremental Gaussian elimination over GF(2).

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn lowest_set(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the bits selected by `mask`.
    pub fn dot(&self, mask: &BitVec) -> bool {
        self.words.iter().zip(&mask.words).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }
}

/// Row of an augmented system, remembering which input rows were summed.
#[derive(Debug, Clone)]
struct Row {
    vars: BitVec,
    rhs: bool,
    combo: BitVec,
}

/// Incremental elimination with lowest-index pivots.
#[derive(Debug, Clone)]
pub struct Elimination {
    n_vars: usize,
    n_rows: usize,
    // indexed by pivot column
    pivots: Vec<Option<Row>>,
    inconsistency: Option<BitVec>,
}

impl Elimination {
    pub fn new(n_vars: usize, n_rows: usize) -> Self {
        Elimination { n_vars, n_rows, pivots: vec![None; n_vars], inconsistency: None }
    }

    /// Adds input row `index`. Rows must be added with distinct indices
    /// below `n_rows`.
    pub fn push(&mut self, index: usize, vars: BitVec, rhs: bool) {
        let mut row = Row { vars, rhs, combo: BitVec::from_indices(self.n_rows, [index]) };
        while let Some(p) = row.vars.lowest_set() {
            match &self.pivots[p] {
                Some(pr) => {
                    row.vars.xor_assign(&pr.vars);
                    row.rhs ^= pr.rhs;
                    row.combo.xor_assign(&pr.combo);
                }
                None => {
                    self.pivots[p] = Some(row);
                    return;
                }
            }
        }
        if row.rhs && self.inconsistency.is_none() {
            self.inconsistency = Some(row.combo);
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.iter().filter(|p| p.is_some()).count()
    }

    /// Input rows whose sum is `0 = 1`, if the system is inconsistent.
    pub fn inconsistency(&self) -> Option<&BitVec> {
        self.inconsistency.as_ref()
    }

    /// Back-substitution with the free variables set as given (free
    /// positions of `free` are used, the rest ignored).
    fn substitute(&self, free: &BitVec, homogeneous: bool) -> BitVec {
        let mut x = BitVec::zeros(self.n_vars);
        for v in 0..self.n_vars {
            if self.pivots[v].is_none() && free.get(v) {
                x.set(v, true);
            }
        }
        for p in (0..self.n_vars).rev() {
            if let Some(row) = &self.pivots[p] {
                // every other variable of the row lies above p
                let mut val = row.rhs && !homogeneous;
                for j in row.vars.ones().skip(1) {
                    val ^= x.get(j);
                }
                x.set(p, val);
            }
        }
        x
    }

    /// One solution with all free variables zero, unless inconsistent.
    pub fn particular(&self) -> Option<BitVec> {
        self.inconsistency.is_none().then(|| self.substitute(&BitVec::zeros(self.n_vars), false))
    }

    /// Basis of the homogeneous solution space, one vector per free
    /// variable in increasing order.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        (0..self.n_vars)
            .filter(|&v| self.pivots[v].is_none())
            .map(|v| self.substitute(&BitVec::from_indices(self.n_vars, [v]), true))
            .collect()
    }
}
