//! Coordinate oracles.
//!
//! The accelerated engine never sees a matrix. It sees an oracle holding two
//! registers `u, w` (dense vectors updated one coordinate at a time) and
//! answering partial-derivative queries at linear combinations of them:
//! `partial(i, c1, c2) = f_i(c1 u + c2 w)`. Because the engine's two iterate
//! sequences are linear combinations of the registers, this is exactly the
//! query it needs, and a concrete oracle can answer it in O(1)..O(row)
//! time by caching matrix-vector products of the registers.
//!
//! Register bookkeeping lives inside the oracle: `notify_increment` applies
//! a one-coordinate update to a register and patches the caches
//! incrementally; to bound floating-point drift the caches are rebuilt from
//! scratch every `10 n` increments.

mod dual;
mod spd;

pub use dual::DualLeastSquaresOracle;
pub use spd::SpdQuadraticOracle;

use crate::csr::CsrMatrix;
use crate::dense;
use crate::error::{Error, Result};

/// Which of the two registers an update targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    U,
    W,
}

/// Partial-derivative oracle for `f` over two registers.
///
/// Contract, for registers `u, w` of length `dim()`:
/// * `partial(i, c1, c2)` returns the i-th partial derivative of `f` at the
///   point `c1 u + c2 w`;
/// * `lipschitz(i)` returns `L_i`, a coordinate-wise gradient Lipschitz
///   constant: `|f_i(x + t e_i) - f_i(x)| <= L_i |t|` for all `x, t`;
/// * `notify_increment(reg, i, d)` performs `reg[i] += d`;
/// * `set_registers` overwrites both registers and rebuilds all caches;
/// * `value(x)` evaluates `f` at an arbitrary point (diagnostics and
///   test harnesses only; it is not used on the iteration fast path).
pub trait CoordinateOracle {
    fn dim(&self) -> usize;

    fn lipschitz(&self, i: usize) -> f64;

    fn registers(&self) -> (&[f64], &[f64]);

    fn partial(&self, i: usize, c1: f64, c2: f64) -> f64;

    fn notify_increment(&mut self, reg: Register, i: usize, delta: f64);

    fn set_registers(&mut self, u: &[f64], w: &[f64]);

    fn value(&self, x: &[f64]) -> f64;

    /// Full gradient at `c1 u + c2 w`; O(n) partial queries.
    fn full_gradient(&self, c1: f64, c2: f64) -> Vec<f64> {
        (0..self.dim()).map(|i| self.partial(i, c1, c2)).collect()
    }
}

/// Result of comparing an analytic partial derivative against a central
/// finite difference of `value()`.
#[derive(Debug, Clone, Copy)]
pub struct FiniteDiffReport {
    pub analytic: f64,
    pub numeric: f64,
}

impl FiniteDiffReport {
    pub fn abs_error(&self) -> f64 {
        (self.analytic - self.numeric).abs()
    }
}

/// Checks `partial(i, 1, 0)` at the point `x` against the central difference
/// `(f(x + h e_i) - f(x - h e_i)) / 2h`. Overwrites the oracle's registers.
pub fn finite_diff_check<O: CoordinateOracle>(
    oracle: &mut O,
    x: &[f64],
    i: usize,
    h: f64,
) -> FiniteDiffReport {
    assert_eq!(x.len(), oracle.dim(), "dimension mismatch");
    assert!(h > 0.0, "step must be positive");
    let zeros = vec![0.0; x.len()];
    oracle.set_registers(x, &zeros);
    let analytic = oracle.partial(i, 1.0, 0.0);
    let mut xp = x.to_vec();
    xp[i] += h;
    let mut xm = x.to_vec();
    xm[i] -= h;
    let numeric = (oracle.value(&xp) - oracle.value(&xm)) / (2.0 * h);
    FiniteDiffReport { analytic, numeric }
}

/// Spectral data of a symmetric positive definite matrix, computed by the
/// dense reference eigensolver (desk scale, n <= a few thousand).
#[derive(Debug, Clone, Copy)]
pub struct SpdParameters {
    /// Smallest eigenvalue (the strong convexity modulus of the quadratic).
    pub sigma: f64,
    /// Largest eigenvalue (the gradient Lipschitz constant).
    pub lmax: f64,
    /// Trace, i.e. the sum of coordinate Lipschitz constants.
    pub s1: f64,
}

/// Computes `(sigma, lmax, s1)` for a symmetric positive definite matrix.
pub fn spd_parameters(a: &CsrMatrix) -> Result<SpdParameters> {
    let ev = dense::symmetric_eigenvalues(a)?;
    let sigma = ev[0];
    let lmax = *ev.last().expect("eigenvalues nonempty");
    if sigma <= 0.0 {
        return Err(Error::invalid(format!(
            "matrix is not positive definite (min eigenvalue {sigma})"
        )));
    }
    let s1 = (0..a.nrows()).map(|i| a.diagonal(i)).sum();
    Ok(SpdParameters { sigma, lmax, s1 })
}

/// Strong convexity modulus of `1/2 x'Ax - b'x` with respect to the norm
/// with weights `L_i^(1-a)`: the smallest eigenvalue of
/// `D^(-1/2) A D^(-1/2)` with `D = diag(L^(1-a))`, `L_i = A_ii`. At
/// `a = 1` this is the plain smallest eigenvalue. Dense; desk scale.
pub fn weighted_sigma(a: &CsrMatrix, exponent: f64) -> Result<f64> {
    let n = a.nrows();
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let li = a.diagonal(i);
        if li <= 0.0 {
            return Err(Error::invalid("diagonal must be positive"));
        }
        d.push(li.powf((1.0 - exponent) / 2.0));
    }
    let dense_rows = a.to_dense();
    let mut scaled = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            scaled[i][j] = dense_rows[i][j] / (d[i] * d[j]);
        }
    }
    let ev = dense::symmetric_eigenvalues(&CsrMatrix::from_dense(&scaled)?)?;
    Ok(ev[0])
}
