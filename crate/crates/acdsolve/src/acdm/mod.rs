//! Accelerated coordinate descent with O(1) iterations.
//!
//! The method maintains two coupled sequences `x_k, v_k` whose mixing
//! coefficients change every iteration, which naively costs O(n) per step
//! just to form `y_k = alpha_k v_k + (1 - alpha_k) x_k`. Here the pair
//! `(v_k, y_k)` is kept as a 2x2 matrix `B_k` over two fixed registers
//! `(u, w)` owned by the oracle; each iteration multiplies `B_k` by a 2x2
//! coefficient matrix and adds a single-coordinate increment to the
//! registers, so the per-iteration cost is one partial derivative plus
//! O(1) bookkeeping.
//!
//! Submodules:
//!
//! * [`coeffs`](self) — the `(gamma, beta, alpha)` coefficient schedule,
//!   Lipschitz thresholding, and the fixed `theta` of the simple mode;
//! * `pair` — the implicit 2x2 change of basis;
//! * `engine` — the iteration loop, stopping rules, noise injection;
//! * `trace` — convergence traces and operation counters.

mod coeffs;
mod engine;
mod pair;
mod trace;

pub use coeffs::{
    simple_theta, thresholded_lipschitz, CoeffFrame, CoefficientState, ThresholdedLipschitz,
};
pub use engine::{run, AcdmConfig, AcdmEngine, AcdmRun, Mode, NoiseSpec, StopRule};
pub use pair::{ImplicitPair, DET_FLOOR};
pub use trace::{strip_wall_column, ConvergenceTrace, OpCounts, TraceRow};
