//! Accelerated coordinate descent solvers.
//!
//! This crate implements an accelerated coordinate descent method (ACDM) for
//! smooth strongly convex minimization, built around a coordinate oracle
//! abstraction so that one engine drives three concrete solvers:
//!
//! * symmetric positive definite quadratics (`oracle::SpdQuadraticOracle`),
//! * overdetermined least squares through the dual, i.e. an accelerated
//!   randomized Kaczmarz method (`kaczmarz`),
//! * symmetric diagonally dominant / graph Laplacian systems through an
//!   electrical flow formulation (`sdd`).
//!
//! The engine samples coordinate `i` with probability proportional to
//! `max(L_i, (S_a/n)^(1/a))^a`, where `L_i` is the coordinate-wise gradient
//! Lipschitz constant, `S_a = sum_i L_i^a`, and `a` is a sampling exponent in
//! `[0, 1]`. Each iteration performs O(1) oracle calls: the two dense iterate
//! sequences of the accelerated method are never formed. Instead they are
//! represented as a 2x2 change of basis over a pair of registers that receive
//! one-coordinate updates (`acdm::ImplicitPair`).
//!
//! Supporting modules: plain descent baselines for comparison (`baselines`),
//! a chain-structured worst-case instance generator that exhibits the
//! `sqrt(n S_1 / sigma)` complexity floor for coordinate samplers
//! (`hardinstance`), and a small benchmark harness with a text spec format
//! and CSV traces (`bench`).
//!
//! Dense factorizations (eigenvalues, Cholesky, SVD) appear only in `dense`
//! as desk-scale reference computations for tests and instance generators;
//! the solvers themselves touch matrices row-by-row.

pub mod acdm;
pub mod baselines;
pub mod bench;
pub mod csr;
pub mod dense;
pub mod error;
pub mod hardinstance;
pub mod io;
pub mod kaczmarz;
pub mod norm;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod sdd;

pub use csr::CsrMatrix;
pub use error::{Error, Result};
pub use norm::WeightedNorm;
pub use rng::SolverRng;
pub use sampler::AliasSampler;
