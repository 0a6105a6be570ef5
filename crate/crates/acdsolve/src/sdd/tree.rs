//! Spanning trees rooted at vertex 0, with per-off-tree-edge stretch.
//!
//! The tree fixes the coordinate system of the flow solver: every off-tree
//! edge `e = (a, b)` owns the cycle that sends one unit along `e` and one
//! unit back through the tree from `b` to `a`. The cycle's coordinate
//! Lipschitz constant is `st(e) + 1`, where the stretch `st(e)` is the
//! tree-path resistance between the endpoints divided by `r_e`.

use crate::error::{Error, Result};
use crate::sdd::graph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeStrategy {
    /// Kruskal on ascending resistance: the minimum-total-resistance tree.
    MinResistance,
    /// Breadth-first discovery tree from vertex 0.
    BfsFromRoot,
}

#[derive(Debug, Clone, Copy)]
pub struct OffTreeEdge {
    /// Index into the graph's edge list.
    pub edge_index: usize,
    pub u: usize,
    pub v: usize,
    pub r: f64,
    pub stretch: f64,
    /// `stretch + 1`: the cycle coordinate's Lipschitz constant in the
    /// resistance-rescaled space.
    pub lipschitz: f64,
}

/// A rooted spanning tree. Tree-edge quantities are stored per non-root
/// vertex and refer to the edge between the vertex and its parent, measured
/// in the child-to-parent direction.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    n: usize,
    parent: Vec<usize>,
    parent_edge_r: Vec<f64>,
    /// +1 when the original edge is oriented child -> parent, else -1.
    parent_edge_sign: Vec<f64>,
    parent_edge_index: Vec<usize>,
    depth: Vec<usize>,
    /// Breadth-first order from the root; parents precede children.
    order: Vec<usize>,
    children: Vec<Vec<usize>>,
    is_tree_edge: Vec<bool>,
    off_tree: Vec<OffTreeEdge>,
}

pub fn build_spanning_tree(g: &WeightedGraph, strategy: TreeStrategy) -> Result<SpanningTree> {
    let n = g.n();
    let chosen = match strategy {
        TreeStrategy::MinResistance => kruskal(g),
        TreeStrategy::BfsFromRoot => bfs_tree(g),
    };
    if chosen.len() != n - 1 {
        return Err(Error::invalid(
            "graph is disconnected: no spanning tree exists",
        ));
    }

    let mut is_tree_edge = vec![false; g.m()];
    for &e in &chosen {
        is_tree_edge[e] = true;
    }

    // Root the chosen edges at 0 by BFS.
    let mut tree_adj = vec![Vec::new(); n];
    for &idx in &chosen {
        let e = g.edges()[idx];
        tree_adj[e.u].push((e.v, idx));
        tree_adj[e.v].push((e.u, idx));
    }
    let mut parent = vec![usize::MAX; n];
    let mut parent_edge_r = vec![0.0; n];
    let mut parent_edge_sign = vec![0.0; n];
    let mut parent_edge_index = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();
    parent[0] = 0;
    queue.push_back(0);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &(v, idx) in &tree_adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                let e = g.edges()[idx];
                parent_edge_r[v] = e.r;
                parent_edge_sign[v] = if e.u == v { 1.0 } else { -1.0 };
                parent_edge_index[v] = idx;
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut children = vec![Vec::new(); n];
    for v in 1..n {
        children[parent[v]].push(v);
    }

    let mut tree = SpanningTree {
        n,
        parent,
        parent_edge_r,
        parent_edge_sign,
        parent_edge_index,
        depth,
        order,
        children,
        is_tree_edge,
        off_tree: Vec::new(),
    };
    for (idx, e) in g.edges().iter().enumerate() {
        if !tree.is_tree_edge[idx] {
            let stretch = tree.path_resistance(e.u, e.v) / e.r;
            tree.off_tree.push(OffTreeEdge {
                edge_index: idx,
                u: e.u,
                v: e.v,
                r: e.r,
                stretch,
                lipschitz: stretch + 1.0,
            });
        }
    }
    Ok(tree)
}

/// `S_1 = sum over off-tree edges of (st(e) + 1)`: the total coordinate
/// Lipschitz mass of the cycle objective, which governs the solver's
/// iteration count. Reported so tree strategies can be compared.
pub fn measured_total_stretch(t: &SpanningTree) -> f64 {
    t.off_tree.iter().map(|e| e.lipschitz).sum()
}

impl SpanningTree {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parent(&self) -> &[usize] {
        &self.parent
    }

    pub fn depth(&self) -> &[usize] {
        &self.depth
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn children(&self) -> &[Vec<usize>] {
        &self.children
    }

    pub fn parent_edge_r(&self) -> &[f64] {
        &self.parent_edge_r
    }

    pub fn parent_edge_sign(&self) -> &[f64] {
        &self.parent_edge_sign
    }

    pub fn parent_edge_index(&self) -> &[usize] {
        &self.parent_edge_index
    }

    pub fn is_tree_edge(&self, edge_index: usize) -> bool {
        self.is_tree_edge[edge_index]
    }

    pub fn off_tree(&self) -> &[OffTreeEdge] {
        &self.off_tree
    }

    /// Total resistance along the tree path between `u` and `v`, by
    /// walking up to the common ancestor (O(depth); the path structure has
    /// the O(log n) version for hot loops).
    pub fn path_resistance(&self, mut u: usize, mut v: usize) -> f64 {
        let mut total = 0.0;
        while self.depth[u] > self.depth[v] {
            total += self.parent_edge_r[u];
            u = self.parent[u];
        }
        while self.depth[v] > self.depth[u] {
            total += self.parent_edge_r[v];
            v = self.parent[v];
        }
        while u != v {
            total += self.parent_edge_r[u] + self.parent_edge_r[v];
            u = self.parent[u];
            v = self.parent[v];
        }
        total
    }
}

fn kruskal(g: &WeightedGraph) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..g.m()).collect();
    idx.sort_by(|&a, &b| {
        g.edges()[a]
            .r
            .partial_cmp(&g.edges()[b].r)
            .expect("finite resistances")
    });
    let mut uf = UnionFind::new(g.n());
    let mut chosen = Vec::with_capacity(g.n() - 1);
    for e in idx {
        let edge = g.edges()[e];
        if uf.union(edge.u, edge.v) {
            chosen.push(e);
            if chosen.len() == g.n() - 1 {
                break;
            }
        }
    }
    chosen
}

fn bfs_tree(g: &WeightedGraph) -> Vec<usize> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n()];
    let mut chosen = Vec::with_capacity(g.n().saturating_sub(1));
    let mut queue = std::collections::VecDeque::new();
    seen[0] = true;
    queue.push_back(0);
    while let Some(u) = queue.pop_front() {
        for &(v, idx) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                chosen.push(idx);
                queue.push_back(v);
            }
        }
    }
    chosen
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_stretch() {
        // Tree {(0,2), (2,1)}; the off-tree edge (0,1) sees two unit tree
        // edges: st = 2, L = 3.
        let g = WeightedGraph::new(3, &[(0, 2, 1.0), (2, 1, 1.0), (0, 1, 1.0)]).unwrap();
        let t = build_spanning_tree(&g, TreeStrategy::MinResistance).unwrap();
        assert_eq!(t.off_tree().len(), 1);
        let e = t.off_tree()[0];
        assert_eq!(e.edge_index, 2);
        assert_eq!(e.stretch, 2.0);
        assert_eq!(e.lipschitz, 3.0);
        assert_eq!(measured_total_stretch(&t), 3.0);
    }

    #[test]
    fn tree_input_has_no_off_tree_edges() {
        let g = WeightedGraph::new(4, &[(0, 1, 2.0), (1, 2, 1.0), (1, 3, 5.0)]).unwrap();
        let t = build_spanning_tree(&g, TreeStrategy::BfsFromRoot).unwrap();
        assert!(t.off_tree().is_empty());
        assert_eq!(measured_total_stretch(&t), 0.0);
    }

    #[test]
    fn star_with_chord() {
        let g = WeightedGraph::new(
            5,
            &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0), (1, 2, 1.0)],
        )
        .unwrap();
        let t = build_spanning_tree(&g, TreeStrategy::BfsFromRoot).unwrap();
        assert_eq!(t.off_tree().len(), 1);
        assert_eq!(t.off_tree()[0].stretch, 2.0);
    }

    #[test]
    fn cycle_off_tree_edge_has_full_stretch() {
        let n = 9;
        let edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        let g = WeightedGraph::new(n, &edges).unwrap();
        let t = build_spanning_tree(&g, TreeStrategy::BfsFromRoot).unwrap();
        assert_eq!(t.off_tree().len(), 1);
        assert_eq!(t.off_tree()[0].stretch, (n - 1) as f64);
        assert_eq!(measured_total_stretch(&t), n as f64);
    }

    #[test]
    fn min_resistance_avoids_heavy_edges() {
        let g = WeightedGraph::new(3, &[(0, 1, 10.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let t = build_spanning_tree(&g, TreeStrategy::MinResistance).unwrap();
        assert_eq!(t.off_tree()[0].edge_index, 0);
        // Stretch of the heavy chord over two light edges: 2/10.
        assert!((t.off_tree()[0].stretch - 0.2).abs() < 1e-15);
    }

    #[test]
    fn disconnected_graph_rejected() {
        let g = WeightedGraph::new(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(build_spanning_tree(&g, TreeStrategy::MinResistance).is_err());
    }

    #[test]
    fn path_resistance_hand_value() {
        // 0 - 1 - 2 - 3 with resistances 1, 2, 4, plus vertex 4 off 1.
        let g = WeightedGraph::new(
            5,
            &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 4.0), (1, 4, 8.0)],
        )
        .unwrap();
        let t = build_spanning_tree(&g, TreeStrategy::BfsFromRoot).unwrap();
        assert_eq!(t.path_resistance(3, 4), 14.0);
        assert_eq!(t.path_resistance(0, 3), 7.0);
        assert_eq!(t.path_resistance(2, 2), 0.0);
    }

    #[test]
    fn bfs_order_parents_first() {
        let g = WeightedGraph::new(6, &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 4, 1.0), (4, 5, 1.0)]).unwrap();
        let t = build_spanning_tree(&g, TreeStrategy::BfsFromRoot).unwrap();
        let rank: Vec<usize> = {
            let mut r = vec![0; 6];
            for (i, &v) in t.order().iter().enumerate() {
                r[v] = i;
            }
            r
        };
        for v in 1..6 {
            assert!(rank[t.parent()[v]] < rank[v]);
        }
    }
}
