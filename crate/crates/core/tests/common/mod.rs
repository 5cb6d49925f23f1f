//! Brute-force oracles for the integration tests. None of them calls the
//! library routine it is used to check.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use qsym_core::graph::Graph;

pub fn matrix(g: &Graph) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; g.n()]; g.n()];
    for &(u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

/// Every permutation of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    go(n, &mut cur, &mut used, &mut out);
    out
}

pub fn maps_onto(x: &[Vec<bool>], y: &[Vec<bool>], p: &[usize]) -> bool {
    let n = x.len();
    (0..n).all(|i| (0..n).all(|j| x[i][j] == y[p[i]][p[j]]))
}

pub fn brute_automorphisms(g: &Graph) -> Vec<Vec<usize>> {
    let m = matrix(g);
    permutations(g.n()).into_iter().filter(|p| maps_onto(&m, &m, p)).collect()
}

pub fn brute_isomorphic(x: &Graph, y: &Graph) -> bool {
    if x.n() != y.n() || x.edge_count() != y.edge_count() {
        return false;
    }
    let (a, b) = (matrix(x), matrix(y));
    permutations(x.n()).iter().any(|p| maps_onto(&a, &b, p))
}

/// Relabels by first occurrence so two colourings of the same partition
/// compare equal.
pub fn canonical<T: Clone + Eq + std::hash::Hash>(labels: &[T]) -> Vec<usize> {
    let mut seen = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let k = seen.len();
            *seen.entry(l.clone()).or_insert(k)
        })
        .collect()
}

/// One round of pair refinement on an `n x n` colouring.
pub fn refine_pairs(n: usize, colors: &[usize]) -> Vec<usize> {
    let sigs: Vec<(usize, Vec<(usize, usize)>)> = (0..n * n)
        .map(|p| {
            let (x, y) = (p / n, p % n);
            let mut s: Vec<(usize, usize)> = (0..n).map(|z| (colors[x * n + z], colors[z * n + y])).collect();
            s.sort_unstable();
            (colors[p], s)
        })
        .collect();
    canonical(&sigs)
}

/// 2-dimensional Weisfeiler-Leman by direct iteration.
pub fn naive_wl(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let m = matrix(g);
    let mut colors: Vec<usize> = (0..n * n)
        .map(|p| {
            let (x, y) = (p / n, p % n);
            if x == y {
                0
            } else if m[x][y] {
                1
            } else {
                2
            }
        })
        .collect();
    colors = canonical(&colors);
    loop {
        let next = refine_pairs(n, &colors);
        let (a, b) = (colors.iter().max().copied(), next.iter().max().copied());
        colors = next;
        if a == b {
            return colors;
        }
    }
}

pub fn same_partition(a: &[usize], b: &[u32]) -> bool {
    canonical(a) == canonical(b)
}

fn connected_within(m: &[Vec<bool>], set: &[usize]) -> bool {
    let mut seen = vec![set[0]];
    let mut stack = vec![set[0]];
    while let Some(v) = stack.pop() {
        for &w in set {
            if m[v][w] && !seen.contains(&w) {
                seen.push(w);
                stack.push(w);
            }
        }
    }
    seen.len() == set.len()
}

/// Wagner: searches for five or six disjoint connected branch sets
/// realising a `K5` or `K3,3` minor. Exponential; meant for `n <= 9`.
pub fn has_kuratowski_minor(g: &Graph) -> bool {
    let m = matrix(g);
    let n = g.n();
    let mut block = vec![usize::MAX; n];
    fn leaf(m: &[Vec<bool>], block: &[usize], k: usize) -> bool {
        if k != 5 && k != 6 {
            return false;
        }
        let sets: Vec<Vec<usize>> =
            (0..k).map(|b| (0..block.len()).filter(|&v| block[v] == b).collect()).collect();
        if !sets.iter().all(|s| connected_within(m, s)) {
            return false;
        }
        let adj = |a: usize, b: usize| sets[a].iter().any(|&u| sets[b].iter().any(|&v| m[u][v]));
        if k == 5 {
            return (0..5).all(|a| (a + 1..5).all(|b| adj(a, b)));
        }
        for p in 1..6 {
            for q in p + 1..6 {
                let side: Vec<usize> = vec![0, p, q];
                let other: Vec<usize> = (0..6).filter(|b| !side.contains(b)).collect();
                if side.iter().all(|&a| other.iter().all(|&b| adj(a, b))) {
                    return true;
                }
            }
        }
        false
    }
    fn go(m: &[Vec<bool>], block: &mut Vec<usize>, v: usize, k: usize) -> bool {
        if v == block.len() {
            return leaf(m, block, k);
        }
        // unused, an existing branch set, or a new one
        block[v] = usize::MAX;
        if go(m, block, v + 1, k) {
            return true;
        }
        for b in 0..k.min(6) {
            block[v] = b;
            if go(m, block, v + 1, k) {
                return true;
            }
        }
        if k < 6 {
            block[v] = k;
            if go(m, block, v + 1, k + 1) {
                return true;
            }
        }
        block[v] = usize::MAX;
        false
    }
    go(&m, &mut block, 0, 0)
}

/// Colour refinement on the disjoint union of `x` and `y` from the given
/// initial colours. `None` as soon as the colour histograms of the two
/// sides differ, which rules out every isomorphism respecting `init`.
fn refine_union(x: &Graph, y: &Graph, init: Vec<usize>) -> Option<Vec<usize>> {
    let (nx, ny) = (x.n(), y.n());
    let nb: Vec<Vec<usize>> = (0..nx)
        .map(|v| x.neighbors(v).to_vec())
        .chain((0..ny).map(|v| y.neighbors(v).iter().map(|&t| t + nx).collect()))
        .collect();
    let mut col = init;
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..nx + ny)
            .map(|v| {
                let mut s: Vec<usize> = nb[v].iter().map(|&t| col[t]).collect();
                s.sort_unstable();
                (col[v], s)
            })
            .collect();
        // sorted signature order gives the same names on both sides
        let order: BTreeSet<&(usize, Vec<usize>)> = sigs.iter().collect();
        let name: BTreeMap<&(usize, Vec<usize>), usize> = order.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
        let next: Vec<usize> = sigs.iter().map(|s| name[s]).collect();
        let stable = next.iter().collect::<BTreeSet<_>>().len() == col.iter().collect::<BTreeSet<_>>().len();
        col = next;
        let hist = |r: std::ops::Range<usize>| {
            let mut h = BTreeMap::new();
            for v in r {
                *h.entry(col[v]).or_insert(0usize) += 1;
            }
            h
        };
        if hist(0..nx) != hist(nx..nx + ny) {
            return None;
        }
        if stable {
            return Some(col);
        }
    }
}

/// Whether colour refinement survives giving `u` in `x` and `w` in `y` a
/// shared fresh colour.
pub fn individualized_sides_agree(x: &Graph, u: usize, y: &Graph, w: usize) -> bool {
    let init = (0..x.n() + y.n()).map(|v| usize::from(v == u || v == x.n() + w)).collect();
    refine_union(x, y, init).is_some()
}

/// Complete isomorphism test by individualisation and refinement on the
/// disjoint union, with no automorphism pruning. Leaves are checked edge
/// by edge.
pub fn isomorphic_by_backtracking(x: &Graph, y: &Graph) -> bool {
    fn go(x: &Graph, y: &Graph, init: Vec<usize>, fresh: usize) -> bool {
        let Some(col) = refine_union(x, y, init) else { return false };
        let nx = x.n();
        let mut size = BTreeMap::new();
        for v in 0..nx {
            *size.entry(col[v]).or_insert(0usize) += 1;
        }
        let Some((&target, _)) = size.iter().filter(|(_, &k)| k > 1).min_by_key(|(_, &k)| k) else {
            let pos: BTreeMap<usize, usize> = (0..y.n()).map(|w| (col[nx + w], w)).collect();
            let p: Vec<usize> = (0..nx).map(|v| pos[&col[v]]).collect();
            return maps_onto(&matrix(x), &matrix(y), &p);
        };
        let u = (0..nx).find(|&v| col[v] == target).unwrap();
        (0..y.n()).filter(|&w| col[nx + w] == target).any(|w| {
            let mut next = col.clone();
            next[u] = fresh;
            next[nx + w] = fresh;
            go(x, y, next, fresh + 1)
        })
    }
    x.n() == y.n() && go(x, y, vec![0; x.n() + y.n()], x.n() + y.n())
}

fn ahu(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v].iter().filter(|&&c| c != parent).map(|&c| ahu(adj, c, v)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

fn tree_code(adj: &[Vec<usize>]) -> String {
    let n = adj.len();
    // centres: strip leaves layer by layer
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.iter().map(|&c| ahu(adj, c, usize::MAX)).min().unwrap()
}

/// Unlabelled trees on `n` vertices, one representative each, as edge lists.
pub fn trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut current: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
    current.insert("()".into(), Vec::new());
    for size in 2..=n {
        let mut next = BTreeMap::new();
        for edges in current.values() {
            for attach in 0..size - 1 {
                let mut e = edges.clone();
                e.push((attach, size - 1));
                let mut adj = vec![Vec::new(); size];
                for &(a, b) in &e {
                    adj[a].push(b);
                    adj[b].push(a);
                }
                next.entry(tree_code(&adj)).or_insert(e);
            }
        }
        current = next;
    }
    current.into_values().collect()
}

/// Exhaustive satisfiability of `sum_{i in s} x_i = b` over GF(2).
pub fn brute_gf2(n_vars: usize, rows: &[(Vec<usize>, bool)]) -> bool {
    (0u64..1 << n_vars).any(|x| rows.iter().all(|(s, b)| s.iter().fold(false, |acc, &i| acc ^ (x >> i & 1 == 1)) == *b))
}

/// A small deterministic xorshift stream; independent of the library RNG.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn below(&mut self, k: u64) -> u64 {
        self.next() % k
    }
}

pub fn random_edges(n: usize, percent: u64, rng: &mut XorShift) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.below(100) < percent {
                e.push((u, v));
            }
        }
    }
    e
}

/// Fundamental cycles of a BFS spanning forest, as edge-index lists.
pub fn fundamental_cycles(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let edge = |a: usize, b: usize| g.edges().iter().position(|&e| e == (a.min(b), a.max(b))).unwrap();
    let mut cycles = Vec::new();
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        if parent[u] == v || parent[v] == u {
            continue;
        }
        let mut c = vec![i];
        let (mut a, mut b) = (u, v);
        while a != b {
            if depth[a] >= depth[b] {
                c.push(edge(a, parent[a]));
                a = parent[a];
            } else {
                c.push(edge(b, parent[b]));
                b = parent[b];
            }
        }
        c.sort_unstable();
        cycles.push(c);
    }
    cycles
}

pub mod quantum {
    use num_complex::Complex64;
    use qsym_core::qcert::{random_unitary, ComplexMatrix, MagicUnitaryCandidate};
    use rand::Rng;

    /// `w diag(1, .., 1, 0, .., 0) w*` with `rank` ones.
    pub fn random_projector<R: Rng>(m: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
        let w = random_unitary(m, rng);
        let d = ComplexMatrix::from_fn(m, m, |i, j| Complex64::new(if i == j && i < rank { 1.0 } else { 0.0 }, 0.0));
        &w * d * w.adjoint()
    }

    /// A magic unitary assembled as a direct sum over a random split of
    /// `C^d`: each summand is a permutation matrix or, for `n >= 2`, the
    /// `[[p, 1-p], [1-p, p]]` pattern on two points, then everything is
    /// conjugated by one random unitary.
    pub fn block_diagonal_magic<R: Rng>(n: usize, d: usize, rng: &mut R) -> MagicUnitaryCandidate {
        let mut blocks = vec![ComplexMatrix::zeros(d, d); n * n];
        let mut start = 0;
        while start < d {
            let m = rng.gen_range(1..=d - start);
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let id = ComplexMatrix::identity(m, m);
            let place = |blocks: &mut Vec<ComplexMatrix>, x: usize, y: usize, b: &ComplexMatrix| {
                blocks[x * n + y].view_mut((start, start), (m, m)).copy_from(b);
            };
            if n >= 2 && rng.gen_bool(0.6) {
                let p = random_projector(m, rng.gen_range(0..=m), rng);
                let q = &id - &p;
                let (a, b) = (perm[0], perm[1]);
                place(&mut blocks, a, a, &p);
                place(&mut blocks, b, b, &p);
                place(&mut blocks, a, b, &q);
                place(&mut blocks, b, a, &q);
                for &x in &perm[2..] {
                    place(&mut blocks, x, x, &id);
                }
            } else {
                for x in 0..n {
                    place(&mut blocks, x, perm[x], &id);
                }
            }
            start += m;
        }
        let w = random_unitary(d, rng);
        MagicUnitaryCandidate::new(n, d, blocks).unwrap().conjugated(&w).unwrap()
    }

    /// Independent projectors in every block; essentially never magic.
    pub fn unstructured<R: Rng>(n: usize, d: usize, rng: &mut R) -> MagicUnitaryCandidate {
        let blocks = (0..n * n).map(|_| random_projector(d, rng.gen_range(0..=d), rng)).collect();
        MagicUnitaryCandidate::new(n, d, blocks).unwrap()
    }

    pub fn max_commutator(u: &MagicUnitaryCandidate) -> f64 {
        let mut worst: f64 = 0.0;
        for a in u.blocks() {
            for b in u.blocks() {
                let c = a * b - b * a;
                worst = c.iter().fold(worst, |acc, z| acc.max(z.norm()));
            }
        }
        worst
    }
}
