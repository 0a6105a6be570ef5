//! Weighted undirected graphs with a fixed edge orientation.

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};

/// One oriented edge `u -> v` with resistance `r`. Orientation only fixes
/// the sign convention for flows; the graph is undirected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub r: f64,
}

/// An undirected graph with positive edge resistances. Parallel edges are
/// allowed (each keeps its own coordinate); self-loops are not.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<GraphEdge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        let mut list = Vec::with_capacity(edges.len());
        for (idx, &(u, v, r)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge {idx} touches vertex out of range (n = {n})"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("edge {idx} is a self-loop at {u}")));
            }
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::invalid(format!(
                    "edge {idx} has non-positive or non-finite resistance {r}"
                )));
            }
            list.push(GraphEdge { u, v, r });
        }
        Ok(WeightedGraph { n, edges: list })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Adjacency lists as `(neighbor, edge index)` pairs.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (idx, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, idx));
            adj[e.v].push((e.u, idx));
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut queue = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push(v);
                }
            }
        }
        count == self.n
    }

    /// The graph Laplacian `L = B^T R^{-1} B` as a sparse matrix.
    pub fn laplacian(&self) -> CsrMatrix {
        let mut t = Vec::with_capacity(4 * self.edges.len());
        for e in &self.edges {
            let c = 1.0 / e.r;
            t.push((e.u, e.u, c));
            t.push((e.v, e.v, c));
            t.push((e.u, e.v, -c));
            t.push((e.v, e.u, -c));
        }
        CsrMatrix::from_triplets(self.n, self.n, &t).expect("validated edges")
    }

    /// `B^T z`: the net out-flow at each vertex for per-edge flows `z`
    /// measured along edge orientation.
    pub fn divergence(&self, z: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (e, &ze) in self.edges.iter().zip(z) {
            d[e.u] += ze;
            d[e.v] -= ze;
        }
        d
    }

    /// Flow energy `sum r_e z_e^2 / 2`.
    pub fn energy(&self, z: &[f64]) -> f64 {
        0.5 * self
            .edges
            .iter()
            .zip(z)
            .map(|(e, &ze)| e.r * ze * ze)
            .sum::<f64>()
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::WeightedGraph;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    /// Random-parent spanning tree plus `extra` chords, resistances
    /// log-uniform in [0.1, 10]. Parallel edges may occur; that is legal.
    pub(crate) fn random_connected_graph(n: usize, extra: usize, seed: u64) -> WeightedGraph {
        let mut rng = rng_from_seed(seed);
        let mut edges: Vec<(usize, usize, f64)> = (1..n)
            .map(|v| (rng.gen_range(0..v), v, 10f64.powf(rng.gen_range(-1.0..1.0))))
            .collect();
        let mut added = 0;
        while added < extra {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.push((u, v, 10f64.powf(rng.gen_range(-1.0..1.0))));
                added += 1;
            }
        }
        WeightedGraph::new(n, &edges).unwrap()
    }
}
