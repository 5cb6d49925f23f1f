//! Left-right planarity test (de Fraysseix–Rosenstiehl, in Brandes'
//! formulation). Linear time; answers the decision question only.

use super::Graph;

#[derive(Clone, Copy, Default, PartialEq, Eq)]
struct Interval {
    low: Option<usize>,
    high: Option<usize>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy)]
struct ConflictPair {
    id: usize,
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState<'a> {
    g: &'a Graph,
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    oriented: Vec<bool>,
    source: Vec<usize>,
    target: Vec<usize>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<usize>,
    ordered_adjs: Vec<Vec<usize>>,
    reference: Vec<Option<usize>>,
    lowpt_edge: Vec<Option<usize>>,
    stack_bottom: Vec<Option<usize>>,
    stack: Vec<ConflictPair>,
    next_pair_id: usize,
}

pub(super) fn is_planar(g: &Graph) -> bool {
    let n = g.n();
    let m = g.edge_count();
    if n > 2 && m > 3 * n - 6 {
        return false;
    }
    let mut st = LrState {
        g,
        height: vec![None; n],
        parent_edge: vec![None; n],
        oriented: vec![false; m],
        source: vec![0; m],
        target: vec![0; m],
        lowpt: vec![0; m],
        lowpt2: vec![0; m],
        nesting_depth: vec![0; m],
        ordered_adjs: vec![Vec::new(); n],
        reference: vec![None; m],
        lowpt_edge: vec![None; m],
        stack_bottom: vec![None; m],
        stack: Vec::new(),
        next_pair_id: 0,
    };
    let mut roots = Vec::new();
    for v in 0..n {
        if st.height[v].is_none() {
            st.height[v] = Some(0);
            roots.push(v);
            st.orient(v);
        }
    }
    for v in 0..n {
        let mut out: Vec<usize> = g
            .neighbors(v)
            .iter()
            .map(|&w| g.edge_index(v, w).unwrap())
            .filter(|&e| st.source[e] == v)
            .collect();
        out.sort_by_key(|&e| st.nesting_depth[e]);
        st.ordered_adjs[v] = out;
    }
    roots.into_iter().all(|r| st.test(r))
}

impl LrState<'_> {
    fn h(&self, v: usize) -> usize {
        self.height[v].expect("height assigned during orientation")
    }

    fn orient(&mut self, v: usize) {
        let parent = self.parent_edge[v];
        for i in 0..self.g.neighbors(v).len() {
            let w = self.g.neighbors(v)[i];
            let e = self.g.edge_index(v, w).unwrap();
            if self.oriented[e] {
                continue;
            }
            self.oriented[e] = true;
            self.source[e] = v;
            self.target[e] = w;
            let hv = self.h(v);
            self.lowpt[e] = hv;
            self.lowpt2[e] = hv;
            match self.height[w] {
                None => {
                    self.parent_edge[w] = Some(e);
                    self.height[w] = Some(hv + 1);
                    self.orient(w);
                }
                Some(hw) => self.lowpt[e] = hw,
            }
            self.nesting_depth[e] = 2 * self.lowpt[e] + usize::from(self.lowpt2[e] < hv);
            if let Some(pe) = parent {
                if self.lowpt[e] < self.lowpt[pe] {
                    self.lowpt2[pe] = self.lowpt[pe].min(self.lowpt2[e]);
                    self.lowpt[pe] = self.lowpt[e];
                } else if self.lowpt[e] > self.lowpt[pe] {
                    self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt[e]);
                } else {
                    self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt2[e]);
                }
            }
        }
    }

    fn top_id(&self) -> Option<usize> {
        self.stack.last().map(|p| p.id)
    }

    fn new_pair(&mut self, left: Interval, right: Interval) -> ConflictPair {
        self.next_pair_id += 1;
        ConflictPair { id: self.next_pair_id, left, right }
    }

    fn conflicting(&self, iv: &Interval, b: usize) -> bool {
        !iv.is_empty() && self.lowpt[iv.high.unwrap()] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.left.is_empty() {
            return self.lowpt[p.right.low.unwrap()];
        }
        if p.right.is_empty() {
            return self.lowpt[p.left.low.unwrap()];
        }
        self.lowpt[p.left.low.unwrap()].min(self.lowpt[p.right.low.unwrap()])
    }

    fn test(&mut self, v: usize) -> bool {
        let parent = self.parent_edge[v];
        let adjs = self.ordered_adjs[v].clone();
        for (pos, &ei) in adjs.iter().enumerate() {
            let w = self.target[ei];
            self.stack_bottom[ei] = self.top_id();
            if self.parent_edge[w] == Some(ei) {
                if !self.test(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = Some(ei);
                let p = self.new_pair(Interval::default(), Interval { low: Some(ei), high: Some(ei) });
                self.stack.push(p);
            }
            if self.lowpt[ei] < self.h(v) {
                let pe = parent.expect("return edge below a root is impossible");
                if pos == 0 {
                    self.lowpt_edge[pe] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, pe) {
                    return false;
                }
            }
        }
        if let Some(pe) = parent {
            let u = self.source[pe];
            self.remove_back_edges(pe);
            if self.lowpt[pe] < self.h(u) {
                let top = *self.stack.last().expect("return edges leave a conflict pair");
                let (hl, hr) = (top.left.high, top.right.high);
                self.reference[pe] = match (hl, hr) {
                    (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                    (Some(l), None) => Some(l),
                    _ => hr,
                };
            }
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = self.new_pair(Interval::default(), Interval::default());
        loop {
            let mut q = self.stack.pop().expect("conflict stack underflow");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let qlow = q.right.low.unwrap();
            if self.lowpt[qlow] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.reference[p.right.low.unwrap()] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.reference[qlow] = self.lowpt_edge[e];
            }
            if self.top_id() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(&top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(low) = p.right.low {
                self.reference[low] = q.right.high;
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else if let Some(low) = p.left.low {
                self.reference[low] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.source[e];
        let hu = self.h(u);
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != hu {
                break;
            }
            self.stack.pop();
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(hi) = p.left.high {
                if self.target[hi] != u {
                    break;
                }
                p.left.high = self.reference[hi];
            }
            if p.left.high.is_none() && p.left.low.is_some() {
                self.reference[p.left.low.unwrap()] = p.right.low;
                p.left.low = None;
            }
            while let Some(hi) = p.right.high {
                if self.target[hi] != u {
                    break;
                }
                p.right.high = self.reference[hi];
            }
            if p.right.high.is_none() && p.right.low.is_some() {
                self.reference[p.right.low.unwrap()] = p.left.low;
                p.right.low = None;
            }
            self.stack.push(p);
        }
    }
}
