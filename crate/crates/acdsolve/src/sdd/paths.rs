//! Logarithmic-time signed path operations on a rooted tree.
//!
//! Each non-root vertex `v` carries one value, interpreted as living on the
//! edge from `v` to its parent (the root's slot is inert). A path query
//! between `from` and `to` splits at their lowest common ancestor and treats
//! the two halves with opposite signs, matching the orientation of a cycle
//! traversed `from -> lca -> to`:
//!
//! * [`TreePathStructure::path_add`] adds `+delta` on the `from` side and
//!   `-delta` on the `to` side;
//! * [`TreePathStructure::path_weighted_sum`] returns the resistance-weighted
//!   value sum, `from` side positive, `to` side negative.
//!
//! Heavy-path decomposition maps every root-to-leaf chain onto contiguous
//! array ranges, so both operations touch O(log n) segments of a lazy
//! segment tree.

use crate::sdd::tree::SpanningTree;

#[derive(Debug, Clone)]
pub struct TreePathStructure {
    n: usize,
    parent: Vec<usize>,
    depth: Vec<usize>,
    head: Vec<usize>,
    pos: Vec<usize>,
    seg: SegTree,
}

impl TreePathStructure {
    /// `initial[v]` is the starting value on the edge above `v`;
    /// `initial[0]` (the root slot) is ignored.
    pub fn new(tree: &SpanningTree, initial: &[f64]) -> Self {
        let n = tree.n();
        assert_eq!(initial.len(), n, "initial values must cover every vertex");

        // Subtree sizes in reverse breadth-first order: children before
        // parents.
        let mut size = vec![1usize; n];
        for &v in tree.order().iter().rev() {
            for &c in &tree.children()[v] {
                size[v] += size[c];
            }
        }

        // Assign chain heads and positions. The stack pushes the heavy
        // child last so it is processed immediately after its parent and
        // chains occupy contiguous position ranges.
        let mut head = vec![0usize; n];
        let mut pos = vec![0usize; n];
        let mut counter = 0usize;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((v, h)) = stack.pop() {
            head[v] = h;
            pos[v] = counter;
            counter += 1;
            let heavy = tree.children()[v]
                .iter()
                .copied()
                .max_by_key(|&c| size[c]);
            if let Some(hc) = heavy {
                for &c in &tree.children()[v] {
                    if c != hc {
                        stack.push((c, c));
                    }
                }
                stack.push((hc, h));
            }
        }

        let mut r_by_pos = vec![0.0; n];
        let mut f_by_pos = vec![0.0; n];
        for v in 1..n {
            r_by_pos[pos[v]] = tree.parent_edge_r()[v];
            f_by_pos[pos[v]] = initial[v];
        }

        TreePathStructure {
            n,
            parent: tree.parent().to_vec(),
            depth: tree.depth().to_vec(),
            head,
            pos,
            seg: SegTree::build(&r_by_pos, &f_by_pos),
        }
    }

    pub fn lca(&self, mut u: usize, mut v: usize) -> usize {
        while self.head[u] != self.head[v] {
            if self.depth[self.head[u]] >= self.depth[self.head[v]] {
                u = self.parent[self.head[u]];
            } else {
                v = self.parent[self.head[v]];
            }
        }
        if self.depth[u] <= self.depth[v] {
            u
        } else {
            v
        }
    }

    pub fn path_add(&mut self, from: usize, to: usize, delta: f64) {
        for (lo, hi, sign) in self.segments(from, to) {
            self.seg.add(1, 0, self.n - 1, lo, hi, sign * delta);
        }
    }

    pub fn path_weighted_sum(&self, from: usize, to: usize) -> f64 {
        let mut total = 0.0;
        for (lo, hi, sign) in self.segments(from, to) {
            total += sign * self.seg.weighted_sum(1, 0, self.n - 1, lo, hi, 0.0);
        }
        total
    }

    /// Total resistance of the tree path between `u` and `v` (sign-free).
    pub fn path_resistance(&self, u: usize, v: usize) -> f64 {
        let mut total = 0.0;
        for (lo, hi, _) in self.segments(u, v) {
            total += self.seg.resistance_sum(1, 0, self.n - 1, lo, hi);
        }
        total
    }

    /// Current values in vertex order (the root slot reads 0).
    pub fn vertex_values(&self) -> Vec<f64> {
        let mut by_pos = vec![0.0; self.n];
        self.seg.collect(1, 0, self.n - 1, 0.0, &mut by_pos);
        let mut out = vec![0.0; self.n];
        for v in 0..self.n {
            out[v] = by_pos[self.pos[v]];
        }
        out[0] = 0.0;
        out
    }

    /// Overwrite all values, discarding pending updates.
    pub fn set_values(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.n);
        let mut f_by_pos = vec![0.0; self.n];
        for v in 1..self.n {
            f_by_pos[self.pos[v]] = values[v];
        }
        self.seg.reset_values(&f_by_pos);
    }

    /// Decompose the `from -> lca -> to` path into `(lo, hi, sign)` position
    /// ranges: `+1` for ranges on the `from` side, `-1` on the `to` side.
    fn segments(&self, mut u: usize, mut v: usize) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(8);
        while self.head[u] != self.head[v] {
            if self.depth[self.head[u]] >= self.depth[self.head[v]] {
                out.push((self.pos[self.head[u]], self.pos[u], 1.0));
                u = self.parent[self.head[u]];
            } else {
                out.push((self.pos[self.head[v]], self.pos[v], -1.0));
                v = self.parent[self.head[v]];
            }
        }
        // Same chain now; the shallower endpoint is the lca and its own
        // slot (the edge to *its* parent) stays out of the path.
        if self.depth[u] > self.depth[v] {
            out.push((self.pos[v] + 1, self.pos[u], 1.0));
        } else if self.depth[v] > self.depth[u] {
            out.push((self.pos[u] + 1, self.pos[v], -1.0));
        }
        out
    }
}

/// Lazy segment tree over positions: range add, range `sum r*f`, range
/// `sum r`. Pending adds are never pushed down; queries carry the sum of
/// ancestors' pending values instead.
#[derive(Debug, Clone)]
struct SegTree {
    n: usize,
    r_sum: Vec<f64>,
    rf_sum: Vec<f64>,
    pending: Vec<f64>,
    raw: Vec<f64>,
}

impl SegTree {
    fn build(r: &[f64], f: &[f64]) -> Self {
        let n = r.len();
        let mut seg = SegTree {
            n,
            r_sum: vec![0.0; 4 * n],
            rf_sum: vec![0.0; 4 * n],
            pending: vec![0.0; 4 * n],
            raw: f.to_vec(),
        };
        seg.init(1, 0, n - 1, r);
        seg
    }

    fn init(&mut self, node: usize, lo: usize, hi: usize, r: &[f64]) {
        if lo == hi {
            self.r_sum[node] = r[lo];
            self.rf_sum[node] = r[lo] * self.raw[lo];
            return;
        }
        let mid = (lo + hi) / 2;
        self.init(2 * node, lo, mid, r);
        self.init(2 * node + 1, mid + 1, hi, r);
        self.r_sum[node] = self.r_sum[2 * node] + self.r_sum[2 * node + 1];
        self.rf_sum[node] = self.rf_sum[2 * node] + self.rf_sum[2 * node + 1];
    }

    fn reset_values(&mut self, f: &[f64]) {
        self.raw.copy_from_slice(f);
        for p in self.pending.iter_mut() {
            *p = 0.0;
        }
        self.rebuild(1, 0, self.n - 1);
    }

    fn rebuild(&mut self, node: usize, lo: usize, hi: usize) {
        if lo == hi {
            self.rf_sum[node] = self.r_sum[node] * self.raw[lo];
            return;
        }
        let mid = (lo + hi) / 2;
        self.rebuild(2 * node, lo, mid);
        self.rebuild(2 * node + 1, mid + 1, hi);
        self.rf_sum[node] = self.rf_sum[2 * node] + self.rf_sum[2 * node + 1];
    }

    fn add(&mut self, node: usize, lo: usize, hi: usize, ql: usize, qh: usize, delta: f64) {
        if qh < lo || hi < ql {
            return;
        }
        if ql <= lo && hi <= qh {
            self.pending[node] += delta;
            self.rf_sum[node] += delta * self.r_sum[node];
            if lo == hi {
                self.raw[lo] += delta;
                self.pending[node] = 0.0;
            }
            return;
        }
        let mid = (lo + hi) / 2;
        self.add(2 * node, lo, mid, ql, qh, delta);
        self.add(2 * node + 1, mid + 1, hi, ql, qh, delta);
        self.rf_sum[node] = self.rf_sum[2 * node]
            + self.rf_sum[2 * node + 1]
            + self.pending[node] * self.r_sum[node];
    }

    fn weighted_sum(
        &self,
        node: usize,
        lo: usize,
        hi: usize,
        ql: usize,
        qh: usize,
        carry: f64,
    ) -> f64 {
        if qh < lo || hi < ql {
            return 0.0;
        }
        if ql <= lo && hi <= qh {
            return self.rf_sum[node] + carry * self.r_sum[node];
        }
        let mid = (lo + hi) / 2;
        let below = carry + self.pending[node];
        self.weighted_sum(2 * node, lo, mid, ql, qh, below)
            + self.weighted_sum(2 * node + 1, mid + 1, hi, ql, qh, below)
    }

    fn resistance_sum(&self, node: usize, lo: usize, hi: usize, ql: usize, qh: usize) -> f64 {
        if qh < lo || hi < ql {
            return 0.0;
        }
        if ql <= lo && hi <= qh {
            return self.r_sum[node];
        }
        let mid = (lo + hi) / 2;
        self.resistance_sum(2 * node, lo, mid, ql, qh)
            + self.resistance_sum(2 * node + 1, mid + 1, hi, ql, qh)
    }

    fn collect(&self, node: usize, lo: usize, hi: usize, carry: f64, out: &mut [f64]) {
        if lo == hi {
            out[lo] = self.raw[lo] + carry;
            return;
        }
        let below = carry + self.pending[node];
        let mid = (lo + hi) / 2;
        self.collect(2 * node, lo, mid, below, out);
        self.collect(2 * node + 1, mid + 1, hi, below, out);
    }
}
