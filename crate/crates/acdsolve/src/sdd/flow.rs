//! Flow bookkeeping between edge space and the tree/off-tree split.
//!
//! Conventions, fixed once here and relied on everywhere else in this
//! module tree:
//!
//! * a flow vector `z` lives on the graph's edges in their original
//!   orientation (`z_e > 0` flows from `e.u` to `e.v`);
//! * tree flows are stored per non-root vertex `v` and measure the flow on
//!   the edge above `v` in the child-to-parent direction;
//! * demands `chi` are net injections: a solution satisfies `B^T z = chi`,
//!   where `(B^T z)(u)` sums outgoing minus incoming flow at `u`.

use crate::error::{Error, Result};
use crate::sdd::graph::WeightedGraph;
use crate::sdd::tree::SpanningTree;

/// Routes `demand` using tree edges only, returning child-to-parent flows
/// per vertex (slot 0 unused). The flow on the edge above `v` equals the
/// total demand injected inside `v`'s subtree, computed by one sweep in
/// reverse breadth-first order.
///
/// Fails when the demand is visibly unbalanced; anything below the
/// tolerance is absorbed at the root, which projects the demand onto the
/// balanced subspace.
pub fn initial_tree_flow(tree: &SpanningTree, demand: &[f64]) -> Result<Vec<f64>> {
    if demand.len() != tree.n() {
        return Err(Error::invalid("demand length does not match vertex count"));
    }
    let total: f64 = demand.iter().sum();
    let scale: f64 = demand.iter().map(|d| d.abs()).sum::<f64>().max(1.0);
    if !total.is_finite() || total.abs() > 1e-8 * scale {
        return Err(Error::invalid(format!(
            "demand is unbalanced: sums to {total:.3e}"
        )));
    }
    Ok(tree_flow_unchecked(tree, demand))
}

/// Leaf-elimination sweep without the balance check: the residual demand
/// left at the root is dropped.
pub(crate) fn tree_flow_unchecked(tree: &SpanningTree, demand: &[f64]) -> Vec<f64> {
    let mut subtree = demand.to_vec();
    for &v in tree.order().iter().rev() {
        for &c in &tree.children()[v] {
            subtree[v] += subtree[c];
        }
    }
    subtree[0] = 0.0;
    subtree
}

/// Completes off-tree flows into a full conservative edge flow: the tree
/// edges carry exactly the demand the off-tree edges leave unrouted.
/// `z_off` is indexed like `tree.off_tree()`, in original edge orientation.
pub fn extract_flow(
    g: &WeightedGraph,
    tree: &SpanningTree,
    z_off: &[f64],
    chi: &[f64],
) -> Result<Vec<f64>> {
    if z_off.len() != tree.off_tree().len() {
        return Err(Error::invalid("off-tree flow length mismatch"));
    }
    let mut remaining = chi.to_vec();
    for (j, e) in tree.off_tree().iter().enumerate() {
        remaining[e.u] -= z_off[j];
        remaining[e.v] += z_off[j];
    }
    let f = initial_tree_flow(tree, &remaining)?;
    let mut z = vec![0.0; g.m()];
    for v in 1..tree.n() {
        z[tree.parent_edge_index()[v]] = tree.parent_edge_sign()[v] * f[v];
    }
    for (j, e) in tree.off_tree().iter().enumerate() {
        z[e.edge_index] = z_off[j];
    }
    Ok(z)
}

/// `max_u |(B^T z - chi)(u)|`: how far the flow is from meeting the demand.
pub fn conservation_residual(g: &WeightedGraph, z: &[f64], chi: &[f64]) -> f64 {
    let div = g.divergence(z);
    div.iter()
        .zip(chi)
        .map(|(d, c)| (d - c).abs())
        .fold(0.0, f64::max)
}

/// Potentials induced by the tree flows of `z`, grounded to mean zero.
/// Ohm's law along the edge above `v` gives `x(v) = x(parent) + r f(v)`.
pub fn potentials_from_flow(tree: &SpanningTree, z: &[f64]) -> Vec<f64> {
    let n = tree.n();
    let mut x = vec![0.0; n];
    for &v in tree.order() {
        if v == 0 {
            continue;
        }
        let f = tree.parent_edge_sign()[v] * z[tree.parent_edge_index()[v]];
        x[v] = x[tree.parent()[v]] + tree.parent_edge_r()[v] * f;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    for xi in x.iter_mut() {
        *xi -= mean;
    }
    x
}

/// The dual (potential-side) objective `chi^T x - 1/2 x^T L x`. Its maximum
/// equals the minimum flow energy, so any `x` gives a lower bound on the
/// optimum.
pub fn dual_value(g: &WeightedGraph, x: &[f64], chi: &[f64]) -> f64 {
    let linear: f64 = chi.iter().zip(x).map(|(c, xi)| c * xi).sum();
    let quad: f64 = g
        .edges()
        .iter()
        .map(|e| {
            let drop = x[e.u] - x[e.v];
            drop * drop / e.r
        })
        .sum();
    linear - 0.5 * quad
}

/// `energy(z) - dual(x)`: nonnegative for any conservative `z`, zero only
/// at the optimal pair. Since `OPT - dual(x) = 1/2 ||x - x*||_L^2`, a gap
/// below `eps^2 * dual(x)` certifies `||x - x*||_L <= eps ||x*||_L`.
pub fn duality_gap(g: &WeightedGraph, z: &[f64], x: &[f64], chi: &[f64]) -> f64 {
    g.energy(z) - dual_value(g, x, chi)
}
