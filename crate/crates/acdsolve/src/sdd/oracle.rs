//! Coordinate oracle over cycle space, in resistance-rescaled coordinates.
//!
//! Fix a spanning tree. Every off-tree edge `e = (u, v)` gets one
//! coordinate `y_e = sqrt(r_e) z_e`, where `z_e` is the flow on `e`; tree
//! flows are always the unique completion that satisfies the demand, so
//! the energy becomes an unconstrained quadratic `F(y)` over the off-tree
//! coordinates. Its partial derivatives are cycle sums:
//!
//! ```text
//! dF/dy_e = (r_e z_e + sum of signed r f over the tree path v -> u) / sqrt(r_e)
//! ```
//!
//! The rescaling puts the Hessian at `I + (PSD)`, so `F` is 1-strongly
//! convex in the plain Euclidean norm, while the coordinate Lipschitz
//! constant is `st(e) + 1`. Both constants are exact, not estimates.
//!
//! The oracle keeps two register copies of the decision vector. For each it
//! stores the off-tree coordinates directly and the induced tree
//! circulation in a [`TreePathStructure`], so a partial derivative is one
//! path query and an increment is one path update — O(log n) each. The
//! demand's own tree routing never changes; its cycle sums are
//! precomputed once.

use crate::error::{Error, Result};
use crate::oracle::{CoordinateOracle, Register};
use crate::sdd::flow::{initial_tree_flow, tree_flow_unchecked};
use crate::sdd::graph::WeightedGraph;
use crate::sdd::paths::TreePathStructure;
use crate::sdd::tree::SpanningTree;

#[derive(Debug, Clone, Copy)]
struct OffCoord {
    u: usize,
    v: usize,
    sqrt_r: f64,
}

#[derive(Debug, Clone)]
pub struct CycleOracle {
    tree: SpanningTree,
    off: Vec<OffCoord>,
    lipschitz: Vec<f64>,
    chi: Vec<f64>,
    /// Cycle sums of the base flow (the demand routed tree-only).
    s0: Vec<f64>,
    yu: Vec<f64>,
    yw: Vec<f64>,
    paths_u: TreePathStructure,
    paths_w: TreePathStructure,
}

impl CycleOracle {
    /// Both registers start at zero flow on every off-tree edge.
    pub fn new(g: &WeightedGraph, tree: SpanningTree, chi: &[f64]) -> Result<Self> {
        if tree.n() != g.n() {
            return Err(Error::invalid("tree does not match graph"));
        }
        let f0 = initial_tree_flow(&tree, chi)?;
        let base = TreePathStructure::new(&tree, &f0);
        let off: Vec<OffCoord> = tree
            .off_tree()
            .iter()
            .map(|e| OffCoord {
                u: e.u,
                v: e.v,
                sqrt_r: e.r.sqrt(),
            })
            .collect();
        let lipschitz: Vec<f64> = tree.off_tree().iter().map(|e| e.lipschitz).collect();
        let s0: Vec<f64> = off
            .iter()
            .map(|e| base.path_weighted_sum(e.v, e.u))
            .collect();
        let m = off.len();
        let zeros = vec![0.0; tree.n()];
        let paths = TreePathStructure::new(&tree, &zeros);
        Ok(CycleOracle {
            tree,
            off,
            lipschitz,
            chi: chi.to_vec(),
            s0,
            yu: vec![0.0; m],
            yw: vec![0.0; m],
            paths_u: paths.clone(),
            paths_w: paths,
        })
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    /// Off-tree flows (original edge orientation) at the rescaled point `y`.
    pub fn off_tree_flows(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.off)
            .map(|(yj, e)| yj / e.sqrt_r)
            .collect()
    }

    /// Tree circulation induced by register flows `y`: each coordinate
    /// returns through the tree, so the tree carries minus the off-tree
    /// divergence.
    fn circulation_values(&self, y: &[f64]) -> Vec<f64> {
        let mut demand = vec![0.0; self.tree.n()];
        for (j, e) in self.off.iter().enumerate() {
            let z = y[j] / e.sqrt_r;
            demand[e.u] -= z;
            demand[e.v] += z;
        }
        tree_flow_unchecked(&self.tree, &demand)
    }

    fn cycle_sum(&self, paths: &TreePathStructure, y: &[f64], i: usize) -> f64 {
        let e = &self.off[i];
        e.sqrt_r * y[i] + paths.path_weighted_sum(e.v, e.u)
    }
}

impl CoordinateOracle for CycleOracle {
    fn dim(&self) -> usize {
        self.off.len()
    }

    fn lipschitz(&self, i: usize) -> f64 {
        self.lipschitz[i]
    }

    fn registers(&self) -> (&[f64], &[f64]) {
        (&self.yu, &self.yw)
    }

    fn partial(&self, i: usize, c1: f64, c2: f64) -> f64 {
        let mut s = self.s0[i];
        if c1 != 0.0 {
            s += c1 * self.cycle_sum(&self.paths_u, &self.yu, i);
        }
        if c2 != 0.0 {
            s += c2 * self.cycle_sum(&self.paths_w, &self.yw, i);
        }
        s / self.off[i].sqrt_r
    }

    fn notify_increment(&mut self, reg: Register, i: usize, delta: f64) {
        let e = self.off[i];
        let z = delta / e.sqrt_r;
        match reg {
            Register::U => {
                self.yu[i] += delta;
                self.paths_u.path_add(e.v, e.u, z);
            }
            Register::W => {
                self.yw[i] += delta;
                self.paths_w.path_add(e.v, e.u, z);
            }
        }
    }

    fn set_registers(&mut self, u: &[f64], w: &[f64]) {
        assert_eq!(u.len(), self.off.len());
        assert_eq!(w.len(), self.off.len());
        self.yu.copy_from_slice(u);
        self.yw.copy_from_slice(w);
        let fu = self.circulation_values(&self.yu);
        self.paths_u.set_values(&fu);
        let fw = self.circulation_values(&self.yw);
        self.paths_w.set_values(&fw);
    }

    /// Energy of the full flow at off-tree coordinates `y`, with the tree
    /// completed by conservation. In rescaled coordinates the off-tree
    /// part is simply `||y||^2`.
    fn value(&self, y: &[f64]) -> f64 {
        let mut remaining = self.chi.clone();
        for (j, e) in self.off.iter().enumerate() {
            let z = y[j] / e.sqrt_r;
            remaining[e.u] -= z;
            remaining[e.v] += z;
        }
        let f = tree_flow_unchecked(&self.tree, &remaining);
        let tree_part: f64 = (1..self.tree.n())
            .map(|v| self.tree.parent_edge_r()[v] * f[v] * f[v])
            .sum();
        let off_part: f64 = y.iter().map(|yj| yj * yj).sum();
        0.5 * (tree_part + off_part)
    }
}
