//! Individualization–refinement search for automorphisms and isomorphisms.
//!
//! Vertex colourings are refined by 1-dimensional colour refinement with
//! label-independent renaming (new ids are ranks of the sorted keys
//! `(old colour, sorted neighbour colours)`), so isomorphic nodes of two
//! search trees carry identical colour ids and identical traces.

use num_bigint::BigUint;
use num_traits::One;

use super::perm::{Permutation, PermutationGroup};
use crate::graph::Graph;

const MIX: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(h: u64, w: u64) -> u64 {
    (h ^ w.wrapping_mul(MIX)).rotate_left(27).wrapping_mul(0xff51_afd7_ed55_8ccd)
}

#[derive(Debug, Clone)]
struct Node {
    colors: Vec<u32>,
    cells: usize,
    trace: u64,
}

impl Node {
    fn root(g: &Graph) -> Node {
        let mut node = Node { colors: vec![0; g.n()], cells: usize::from(g.n() > 0), trace: 0 };
        node.trace = refine(g, &mut node.colors, &mut node.cells);
        node
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.colors.len()
    }

    /// Members of the smallest-id cell with more than one vertex.
    fn target_cell(&self) -> Option<Vec<usize>> {
        let mut size = vec![0usize; self.cells];
        for &c in &self.colors {
            size[c as usize] += 1;
        }
        let c = size.iter().position(|&s| s > 1)? as u32;
        Some((0..self.colors.len()).filter(|&v| self.colors[v] == c).collect())
    }

    fn individualize(&self, g: &Graph, v: usize) -> Node {
        let mut colors = self.colors.clone();
        let old = colors[v];
        colors[v] = self.cells as u32;
        let mut cells = self.cells + 1;
        let t = refine(g, &mut colors, &mut cells);
        Node { colors, cells, trace: mix(mix(self.trace, u64::from(old)), t) }
    }
}

/// Refines to the coarsest equitable colouring below `colors`; returns a
/// trace hash of the refinement.
fn refine(g: &Graph, colors: &mut Vec<u32>, cells: &mut usize) -> u64 {
    let n = g.n();
    let mut trace = mix(0, *cells as u64);
    loop {
        let keys: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = g.neighbors(v).iter().map(|&w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut next = vec![0u32; n];
        let mut id = 0u32;
        for (i, &v) in order.iter().enumerate() {
            let fresh = i == 0 || keys[v] != keys[order[i - 1]];
            if fresh {
                if i > 0 {
                    id += 1;
                }
                trace = mix(trace, u64::from(keys[v].0));
                for &c in &keys[v].1 {
                    trace = mix(trace, u64::from(c));
                }
            }
            next[v] = id;
        }
        let count = if n == 0 { 0 } else { id as usize + 1 };
        trace = mix(trace, count as u64);
        let stable = count == *cells;
        *colors = next;
        *cells = count;
        if stable {
            return trace;
        }
    }
}

fn leaf_map(from: &Node, to: &Node) -> Permutation {
    let mut by_color = vec![0; to.colors.len()];
    for (v, &c) in to.colors.iter().enumerate() {
        by_color[c as usize] = v;
    }
    Permutation::from_images(from.colors.iter().map(|&c| by_color[c as usize]).collect())
        .expect("discrete colourings give a bijection")
}

/// Union–find over vertices closed under a set of permutations.
struct Orbits(Vec<usize>);

impl Orbits {
    fn new<'a>(n: usize, gens: impl IntoIterator<Item = &'a Permutation>) -> Self {
        let mut o = Orbits((0..n).collect());
        for g in gens {
            o.absorb(g);
        }
        o
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn absorb(&mut self, g: &Permutation) {
        for x in 0..self.0.len() {
            let (a, b) = (self.find(x), self.find(g.apply(x)));
            if a != b {
                self.0[a.max(b)] = a.min(b);
            }
        }
    }

    fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    fn size_of(&mut self, a: usize) -> usize {
        let r = self.find(a);
        (0..self.0.len()).filter(|&x| self.find(x) == r).count()
    }
}

/// Result of the automorphism search.
#[derive(Debug, Clone)]
pub struct AutomorphismSearch {
    pub group: PermutationGroup,
    /// Vertices individualized along the first path.
    pub base: Vec<usize>,
    /// Orbit of each base point under the stabilizer of the earlier ones.
    pub orbit_sizes: Vec<usize>,
    pub nodes: usize,
}

impl AutomorphismSearch {
    /// Order as the product of the basic orbit lengths.
    pub fn order(&self) -> BigUint {
        self.orbit_sizes.iter().fold(BigUint::one(), |acc, &s| acc * BigUint::from(s))
    }
}

struct FirstPath {
    nodes: Vec<Node>,
    cells: Vec<Vec<usize>>,
    chosen: Vec<usize>,
}

impl FirstPath {
    fn new(g: &Graph) -> Self {
        let mut nodes = vec![Node::root(g)];
        let mut cells = Vec::new();
        let mut chosen = Vec::new();
        while let Some(cell) = nodes.last().unwrap().target_cell() {
            let v = cell[0];
            let next = nodes.last().unwrap().individualize(g, v);
            cells.push(cell);
            chosen.push(v);
            nodes.push(next);
        }
        FirstPath { nodes, cells, chosen }
    }

    fn leaf(&self) -> &Node {
        self.nodes.last().unwrap()
    }
}

struct AutSearch<'a> {
    g: &'a Graph,
    path: FirstPath,
    gens: Vec<Permutation>,
    nodes: usize,
}

impl AutSearch<'_> {
    /// Looks for a leaf below `node` equivalent to the first leaf.
    fn dfs(&mut self, node: Node, depth: usize, seq: &mut Vec<usize>) -> Option<Permutation> {
        self.nodes += 1;
        if depth >= self.path.nodes.len() || node.trace != self.path.nodes[depth].trace {
            return None;
        }
        if node.is_discrete() {
            let sigma = leaf_map(self.path.leaf(), &node);
            let follows = seq.iter().enumerate().all(|(i, &s)| sigma.apply(self.path.chosen[i]) == s);
            return (follows && sigma.is_automorphism(self.g)).then_some(sigma);
        }
        let cell = node.target_cell().expect("non-discrete node has a target cell");
        let mut orbits = Orbits::new(self.g.n(), self.gens.iter().filter(|p| p.fixes_all(seq)));
        let mut tried: Vec<usize> = Vec::new();
        for u in cell {
            if tried.iter().any(|&t| orbits.same(t, u)) {
                continue;
            }
            let child = node.individualize(self.g, u);
            seq.push(u);
            let found = self.dfs(child, depth + 1, seq);
            seq.pop();
            if found.is_some() {
                return found;
            }
            tried.push(u);
        }
        None
    }
}

pub fn automorphism_search(g: &Graph) -> AutomorphismSearch {
    let n = g.n();
    let path = FirstPath::new(g);
    let depth = path.chosen.len();
    let mut s = AutSearch { g, path, gens: Vec::new(), nodes: 0 };
    let mut orbit_sizes = vec![1; depth];
    for d in (0..depth).rev() {
        let v = s.path.chosen[d];
        let cell = s.path.cells[d].clone();
        // every generator found so far fixes chosen[..d]
        let mut orbits = Orbits::new(n, &s.gens);
        let mut failed: Vec<usize> = Vec::new();
        for w in cell {
            if w == v || orbits.same(w, v) || failed.iter().any(|&f| orbits.same(f, w)) {
                continue;
            }
            let child = s.path.nodes[d].individualize(g, w);
            let mut seq: Vec<usize> = s.path.chosen[..d].to_vec();
            seq.push(w);
            match s.dfs(child, d + 1, &mut seq) {
                Some(sigma) => {
                    orbits.absorb(&sigma);
                    s.gens.push(sigma);
                }
                None => failed.push(w),
            }
        }
        orbit_sizes[d] = orbits.size_of(v);
    }
    let base = s.path.chosen.clone();
    let group = PermutationGroup::new(n, s.gens).expect("generators have the graph's degree");
    AutomorphismSearch { group, base, orbit_sizes, nodes: s.nodes }
}

pub fn automorphism_group(g: &Graph) -> PermutationGroup {
    automorphism_search(g).group
}

/// Outcome of an exhaustive isomorphism search.
#[derive(Debug, Clone)]
pub struct IsomorphismSearch {
    /// An isomorphism `x -> y`, or `None` when the pruned search tree
    /// contains none (which proves non-isomorphism).
    pub isomorphism: Option<Permutation>,
    pub nodes: usize,
}

struct IsoSearch<'a> {
    y: &'a Graph,
    x: &'a Graph,
    xpath: FirstPath,
    aut_y: &'a [Permutation],
    nodes: usize,
}

impl IsoSearch<'_> {
    fn dfs(&mut self, node: Node, depth: usize, seq: &mut Vec<usize>) -> Option<Permutation> {
        self.nodes += 1;
        if depth >= self.xpath.nodes.len() || node.trace != self.xpath.nodes[depth].trace {
            return None;
        }
        if node.is_discrete() {
            let sigma = leaf_map(self.xpath.leaf(), &node);
            return sigma.is_isomorphism(self.x, self.y).then_some(sigma);
        }
        let cell = node.target_cell().expect("non-discrete node has a target cell");
        let mut orbits = Orbits::new(self.y.n(), self.aut_y.iter().filter(|p| p.fixes_all(seq)));
        let mut tried: Vec<usize> = Vec::new();
        for u in cell {
            if tried.iter().any(|&t| orbits.same(t, u)) {
                continue;
            }
            let child = node.individualize(self.y, u);
            seq.push(u);
            let found = self.dfs(child, depth + 1, seq);
            seq.pop();
            if found.is_some() {
                return found;
            }
            tried.push(u);
        }
        None
    }
}

/// Exhaustive search for an isomorphism `x -> y`, pruned by traces and by
/// the orbits of `Aut(y)`.
pub fn find_isomorphism(x: &Graph, y: &Graph) -> IsomorphismSearch {
    let mut dx = x.degrees();
    let mut dy = y.degrees();
    dx.sort_unstable();
    dy.sort_unstable();
    if dx != dy {
        return IsomorphismSearch { isomorphism: None, nodes: 0 };
    }
    let aut_y = automorphism_group(y);
    let mut s = IsoSearch { x, y, xpath: FirstPath::new(x), aut_y: aut_y.generators(), nodes: 0 };
    let root = Node::root(y);
    let isomorphism = s.dfs(root, 0, &mut Vec::new());
    IsomorphismSearch { isomorphism, nodes: s.nodes }
}
