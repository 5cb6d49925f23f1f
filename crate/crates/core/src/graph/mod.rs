//! Undirected simple graphs on `0..n` and the structural queries the rest of
//! the crate relies on: distances, components, cut vertices and planarity.

mod io;
mod planar;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use io::{parse_graph, write_graph, write_graph_with_labels};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("label count {labels} does not match vertex count {n}")]
    LabelLength { labels: usize, n: usize },
    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// How two vertices sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexRelation {
    Equal,
    Adjacent,
    DistinctNonAdjacent,
}

/// Hop distance; unreachable pairs are `Infinite`, never a large number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// An undirected simple graph with vertices `0..n`.
///
/// Immutable once built. Edges are kept as sorted `(u, v)` pairs with
/// `u < v`, alongside neighbour lists and a dense adjacency matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    matrix: Vec<bool>,
    labels: Option<Vec<String>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ends.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let e = (u.min(v), u.max(v));
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(Self::from_sorted_edges(n, set.into_iter().collect()))
    }

    // `edges` must already be normalised, sorted and free of duplicates.
    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        let mut matrix = vec![false; n * n];
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
            matrix[u * n + v] = true;
            matrix[v * n + u] = true;
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Graph { n, edges, neighbors, matrix, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n {
            return Err(GraphError::LabelLength { labels: labels.len(), n: self.n });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Graph::new(n, [])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.n + v]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Position of edge `{u, v}` in [`Graph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let e = (u.min(v), u.max(v));
        self.edges.binary_search(&e).ok()
    }

    pub fn rel(&self, x: usize, y: usize) -> VertexRelation {
        if x == y {
            VertexRelation::Equal
        } else if self.has_edge(x, y) {
            VertexRelation::Adjacent
        } else {
            VertexRelation::DistinctNonAdjacent
        }
    }

    /// 0/1 adjacency matrix in row-major order.
    pub fn adjacency(&self) -> Vec<u8> {
        self.matrix.iter().map(|&b| b as u8).collect()
    }

    pub fn complement(&self) -> Graph {
        let n = self.n;
        let mut edges = Vec::with_capacity(n * (n - 1) / 2 - self.edges.len());
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        let mut g = Graph::from_sorted_edges(n, edges);
        g.labels = self.labels.clone();
        g
    }

    /// Graph induced on `vertices` (in the given order) with relabelled ends.
    pub fn induced(&self, vertices: &[usize]) -> Result<Graph, GraphError> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]));
        Graph::new(vertices.len(), edges)
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.n;
        let mut dist = vec![Distance::Infinite; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            row[s] = Distance::Finite(0);
            queue.clear();
            queue.push_back((s, 0));
            while let Some((u, d)) = queue.pop_front() {
                for &w in &self.neighbors[u] {
                    if row[w] == Distance::Infinite {
                        row[w] = Distance::Finite(d + 1);
                        queue.push_back((w, d + 1));
                    }
                }
            }
        }
        DistanceMatrix { n, dist }
    }

    /// `u ~ v` iff their distance in `self` is exactly `d`.
    pub fn distance_graph(&self, d: usize) -> Graph {
        let dm = self.distance_matrix();
        let mut edges = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if dm.get(u, v) == Distance::Finite(d) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_sorted_edges(self.n, edges)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            stack.push(s);
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &w in &self.neighbors[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn is_planar(&self) -> bool {
        planar::is_planar(self)
    }

    /// Articulation points of a connected graph, sorted.
    pub fn cut_vertices(&self) -> Result<Vec<usize>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let n = self.n;
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut is_cut = vec![false; n];
        let mut timer = 0;
        // iterative DFS: (vertex, parent, next neighbour position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(0, usize::MAX, 0)];
        disc[0] = 0;
        low[0] = 0;
        timer += 1;
        let mut root_children = 0;
        while let Some(&mut (u, parent, ref mut pos)) = stack.last_mut() {
            if *pos < self.neighbors[u].len() {
                let w = self.neighbors[u][*pos];
                *pos += 1;
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    if u == 0 {
                        root_children += 1;
                    }
                    stack.push((w, u, 0));
                } else if w != parent {
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[u]);
                    if parent != 0 && low[u] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[0] = true;
        }
        Ok((0..n).filter(|&v| is_cut[v]).collect())
    }

    pub fn has_cut_vertex(&self) -> Result<bool, GraphError> {
        Ok(!self.cut_vertices()?.is_empty())
    }

    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let edges: BTreeSet<_> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u], perm[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        Graph::from_sorted_edges(self.n, edges.into_iter().collect())
    }
}

/// Pairwise hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<Distance>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Distance {
        self.dist[u * self.n + v]
    }

    /// Largest finite distance; `Infinite` for disconnected graphs.
    pub fn diameter(&self) -> Distance {
        self.dist.iter().copied().max().unwrap_or(Distance::Finite(0))
    }
}

pub fn complete_graph(n: usize) -> Result<Graph, GraphError> {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::new(n, edges)
}

/// Parts `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph, GraphError> {
    if a == 0 || b == 0 {
        return Err(GraphError::Empty);
    }
    let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)));
    Graph::new(a + b, edges)
}

/// Circulant on `Z_n`: `i ~ j` iff `(i - j) mod n` lies in `connection_set`.
pub fn circulant(n: usize, connection_set: &[usize]) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let set: BTreeSet<usize> = connection_set.iter().copied().collect();
    for &c in &set {
        if c >= n {
            return Err(GraphError::InvalidConnectionSet(format!("{c} is not a residue mod {n}")));
        }
        if c == 0 {
            return Err(GraphError::InvalidConnectionSet("0 is in the connection set".into()));
        }
        if !set.contains(&(n - c)) {
            return Err(GraphError::InvalidConnectionSet(format!(
                "not inverse-closed: {c} present but {} missing",
                n - c
            )));
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if set.contains(&((j - i) % n)) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

pub fn cycle_graph(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidConnectionSet(format!("a cycle needs 3 vertices, got {n}")));
    }
    circulant(n, &[1, n - 1])
}

pub fn path_graph(n: usize) -> Result<Graph, GraphError> {
    Graph::new(n, (1..n).map(|v| (v - 1, v)))
}

pub fn petersen_graph() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::new(10, edges).expect("petersen edges are valid")
}

/// `x` on `0..n_x`, `y` shifted to `n_x..n_x+n_y`, no cross edges.
///
/// Labels record the side: `0:<label>` for `x`, `1:<label>` for `y`, where
/// an unlabelled side uses its local vertex index.
pub fn disjoint_union(x: &Graph, y: &Graph) -> Graph {
    let shift = x.n;
    let mut edges = x.edges.clone();
    edges.extend(y.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
    let mut g = Graph::from_sorted_edges(x.n + y.n, edges);
    let side = |tag: usize, h: &Graph| -> Vec<String> {
        (0..h.n)
            .map(|v| match &h.labels {
                Some(l) => format!("{tag}:{}", l[v]),
                None => format!("{tag}:{v}"),
            })
            .collect()
    };
    let mut labels = side(0, x);
    labels.extend(side(1, y));
    g.labels = Some(labels);
    g
}

/// Erdős–Rényi `G(n, 1/2)` from a ChaCha8 stream seeded with `seed`.
pub fn random_graph(n: usize, seed: u64) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<bool>() {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}
