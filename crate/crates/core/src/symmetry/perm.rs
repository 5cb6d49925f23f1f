//! Permutations, permutation groups and a Schreier–Sims stabilizer chain.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use super::SymmetryError;
use crate::graph::Graph;

/// Group elements enumerated explicitly at most.
pub const ENUMERATION_BOUND: u64 = 1_000_000;

/// A bijection on `0..n`, stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, SymmetryError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(SymmetryError::NotAPermutation(images));
            }
        }
        Ok(Permutation(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&i| other.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(i, j)| i != *j).map(|(i, _)| i)
    }

    pub fn fixes_all(&self, points: &[usize]) -> bool {
        points.iter().all(|&p| self.0[p] == p)
    }

    /// Whether this maps `x` onto `y`: edges to edges and non-edges to
    /// non-edges.
    pub fn is_isomorphism(&self, x: &Graph, y: &Graph) -> bool {
        self.degree() == x.n()
            && x.n() == y.n()
            && x.edge_count() == y.edge_count()
            && x.edges().iter().all(|&(u, v)| y.has_edge(self.0[u], self.0[v]))
    }

    pub fn is_automorphism(&self, g: &Graph) -> bool {
        self.is_isomorphism(g, g)
    }
}

impl serde::Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    orbit: Vec<usize>,
    // transversal[b] maps the base point to b
    transversal: Vec<Option<Permutation>>,
}

impl Level {
    fn new(n: usize, base: usize) -> Self {
        let mut transversal = vec![None; n];
        transversal[base] = Some(Permutation::identity(n));
        Level { base, gens: Vec::new(), orbit: vec![base], transversal }
    }

    fn rebuild(&mut self) {
        let n = self.transversal.len();
        self.transversal = vec![None; n];
        self.transversal[self.base] = Some(Permutation::identity(n));
        self.orbit = vec![self.base];
        let mut head = 0;
        while head < self.orbit.len() {
            let b = self.orbit[head];
            head += 1;
            for s in &self.gens {
                let c = s.apply(b);
                if self.transversal[c].is_none() {
                    let u = self.transversal[b].as_ref().unwrap().then(s);
                    self.transversal[c] = Some(u);
                    self.orbit.push(c);
                }
            }
        }
    }
}

/// Base, strong generators and transversals of a permutation group.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    n: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new(n: usize, generators: &[Permutation]) -> Self {
        let gens: Vec<&Permutation> = generators.iter().filter(|g| !g.is_identity()).collect();
        let mut levels: Vec<Level> = Vec::new();
        for g in &gens {
            if levels.iter().all(|l| g.apply(l.base) == l.base) {
                levels.push(Level::new(n, g.first_moved().unwrap()));
            }
        }
        let bases: Vec<usize> = levels.iter().map(|l| l.base).collect();
        for (i, level) in levels.iter_mut().enumerate() {
            level.gens = gens.iter().filter(|g| g.fixes_all(&bases[..i])).map(|g| (*g).clone()).collect();
            level.rebuild();
        }
        let mut chain = StabilizerChain { n, levels };
        let mut i = chain.levels.len();
        while i > 0 {
            let lvl = i - 1;
            match chain.failing_schreier_generator(lvl) {
                None => i -= 1,
                Some((h, j)) => {
                    if j == chain.levels.len() {
                        chain.levels.push(Level::new(n, h.first_moved().unwrap()));
                    }
                    for l in lvl + 1..=j {
                        chain.levels[l].gens.push(h.clone());
                        chain.levels[l].rebuild();
                    }
                    i = j + 1;
                }
            }
        }
        chain
    }

    /// Sifts `g` through the levels from `from` on. Returns the residue
    /// and the level at which sifting stopped (`levels.len()` if it passed).
    fn strip(&self, g: Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g;
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let beta = h.apply(level.base);
            match &level.transversal[beta] {
                None => return (h, l),
                Some(u) => h = h.then(&u.inverse()),
            }
        }
        (h, self.levels.len())
    }

    fn failing_schreier_generator(&self, i: usize) -> Option<(Permutation, usize)> {
        let level = &self.levels[i];
        for &beta in &level.orbit {
            let u = level.transversal[beta].as_ref().unwrap();
            for s in &level.gens {
                let u1 = level.transversal[s.apply(beta)].as_ref().unwrap();
                let g1 = u.then(s);
                if &g1 == u1 {
                    continue;
                }
                let (h, j) = self.strip(g1.then(&u1.inverse()), i + 1);
                if j < self.levels.len() || !h.is_identity() {
                    return Some((h, j));
                }
            }
        }
        None
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.n {
            return false;
        }
        let (h, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && h.is_identity()
    }

    /// Every element, as products of transversal elements.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = vec![Permutation::identity(self.n)];
        // g = u_{last} ... u_0 (rightmost applied last)
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for g in &out {
                for &b in &level.orbit {
                    next.push(g.then(level.transversal[b].as_ref().unwrap()));
                }
            }
            out = next;
        }
        out
    }
}

/// A permutation group given by generators, with its stabilizer chain
/// built on first use.
#[derive(Debug, Clone)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabilizerChain>,
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, SymmetryError> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(SymmetryError::SizeMismatch { expected: degree, found: g.degree() });
        }
        Ok(PermutationGroup { degree, generators, chain: OnceLock::new() })
    }

    pub fn trivial(degree: usize) -> Self {
        PermutationGroup { degree, generators: Vec::new(), chain: OnceLock::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabilizerChain {
        self.chain.get_or_init(|| StabilizerChain::new(self.degree, &self.generators))
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain().contains(g)
    }

    /// All elements, or `None` when the order exceeds [`ENUMERATION_BOUND`].
    pub fn elements(&self) -> Option<Vec<Permutation>> {
        (self.order() <= BigUint::from(ENUMERATION_BOUND)).then(|| self.chain().elements())
    }
}

/// One generator per line, as space-separated images.
pub fn write_generators(g: &PermutationGroup) -> String {
    g.generators().iter().map(|p| format!("{p}\n")).collect()
}

pub fn parse_generators(degree: usize, text: &str) -> Result<PermutationGroup, SymmetryError> {
    let mut gens = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let images = line
            .split_whitespace()
            .map(|f| f.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SymmetryError::Parse { line: idx + 1, message: e.to_string() })?;
        if images.len() != degree {
            return Err(SymmetryError::Parse {
                line: idx + 1,
                message: format!("expected {degree} images, found {}", images.len()),
            });
        }
        gens.push(Permutation::from_images(images).map_err(|e| SymmetryError::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?);
    }
    PermutationGroup::new(degree, gens)
}
