//! Electrical flows on weighted graphs, i.e. Laplacian linear systems.
//!
//! Given a connected graph with edge resistances and a balanced demand
//! vector `chi`, the module computes the flow of minimum energy
//! `1/2 sum_e r_e z_e^2` among those satisfying the demand, together with
//! the vertex potentials `x` solving `L x = chi`. The route is purely
//! combinatorial-iterative: fix a spanning tree, parameterize all
//! conservative flows by the off-tree edge flows, and run accelerated
//! coordinate descent over the induced cycle quadratic. Each coordinate
//! step touches one tree path through a lazy segment-tree decomposition,
//! so an iteration costs O(log n) and the expected iteration count scales
//! with `sqrt(m' S_1)`, where `S_1` is the total stretch of the tree plus
//! the number of off-tree edges.
//!
//! Entry point: [`solve_laplacian`]. The pieces (spanning trees with
//! stretch, signed path operations, flow extraction, the cycle-space
//! coordinate oracle) are public for experiments and tests.

mod flow;
mod graph;
mod oracle;
mod paths;
mod solver;
mod tree;

pub use flow::{
    conservation_residual, dual_value, duality_gap, extract_flow, initial_tree_flow,
    potentials_from_flow,
};
pub use graph::{GraphEdge, WeightedGraph};
pub use oracle::CycleOracle;
pub use paths::TreePathStructure;
pub use solver::{plain_cycle_run, solve_laplacian, LaplacianConfig, LaplacianSolution};
pub use tree::{
    build_spanning_tree, measured_total_stretch, OffTreeEdge, SpanningTree, TreeStrategy,
};
