//! The chain quadratic on which no coordinate method can beat the
//! accelerated rate.
//!
//! For a target strong convexity `sigma` and total coordinate Lipschitz
//! budget `S_1 = n L`, the instance is
//!
//! ```text
//! f(x) = (L - sigma)/4 [ (1 - x_1)^2 + sum (x_i - x_{i+1})^2 + (x_n - q^{n+1})^2 ]
//!        + sigma/2 ||x||^2
//! ```
//!
//! i.e. a discrete string pinned at both ends, whose Hessian is
//! `(L - sigma)/2 tridiag(-1, 2, -1) + sigma I`. Its minimizer decays
//! geometrically, `x*(k) = q^k` with `q = a - sqrt(a^2 - 1)`,
//! `a = L/(L - sigma)`: information travels along the chain one coordinate
//! per query, but the solution has mass everywhere, so any method whose
//! iterates stay in the span of the coordinates it has touched keeps, in
//! expectation, a value gap of at least
//!
//! ```text
//! sigma/2 (1 - 2 sqrt(2 sigma / (n S_1)))^k ||x* - x_0||^2  -  tail(n)
//! ```
//!
//! for `k <= n^2/2`, where the exponentially small tail pays for pinning
//! the far end at `q^{n+1}` instead of running the chain to infinity. The
//! accelerated method's contraction exponent is exactly a quarter of the
//! one in this bound, so it is optimal among such methods up to the
//! constant 4.

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct HardInstance {
    /// The tridiagonal Hessian; every diagonal entry equals `l`.
    pub matrix: CsrMatrix,
    /// Linear term: nonzero only in the first and last coordinates.
    pub rhs: Vec<f64>,
    /// Closed-form minimizer, `x_star[k] = q^(k+1)`.
    pub x_star: Vec<f64>,
    /// Decay ratio of the minimizer.
    pub q: f64,
    /// Per-coordinate Lipschitz constant `S_1 / n`.
    pub l: f64,
    pub sigma: f64,
    pub s1: f64,
}

/// Requires `S_1 > 4 sigma n`, which keeps `q` inside
/// `[1 - sqrt(2 sigma/L), 1 - sqrt(sigma/L)/2]`.
pub fn make_hard_instance(n: usize, sigma: f64, s1: f64) -> Result<HardInstance> {
    if n < 2 {
        return Err(Error::invalid("hard instance needs n >= 2"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid("sigma must be positive"));
    }
    if !(s1 > 4.0 * sigma * n as f64) {
        return Err(Error::invalid(format!(
            "need S_1 > 4 sigma n, got S_1 = {s1} with 4 sigma n = {}",
            4.0 * sigma * n as f64
        )));
    }
    let l = s1 / n as f64;
    let half = (l - sigma) / 2.0;
    let a = l / (l - sigma);
    let q = a - (a * a - 1.0).sqrt();

    let mut triplets = Vec::with_capacity(3 * n);
    for i in 0..n {
        triplets.push((i, i, l));
        if i + 1 < n {
            triplets.push((i, i + 1, -half));
            triplets.push((i + 1, i, -half));
        }
    }
    let matrix = CsrMatrix::from_triplets(n, n, &triplets)?;

    let mut rhs = vec![0.0; n];
    rhs[0] = half;
    rhs[n - 1] = half * q.powi(n as i32 + 1);

    let x_star: Vec<f64> = (1..=n).map(|k| q.powi(k as i32)).collect();

    Ok(HardInstance {
        matrix,
        rhs,
        x_star,
        q,
        l,
        sigma,
        s1,
    })
}

/// The guaranteed expected value gap after `k` coordinate queries, starting
/// from squared distance `dist0_sq = ||x* - x_0||^2`. Valid for
/// `k <= n^2 / 2` and uniform coordinate sampling.
pub fn lower_bound_curve(n: usize, sigma: f64, s1: f64, dist0_sq: f64, k: usize) -> f64 {
    let nf = n as f64;
    let rate = 1.0 - 2.0 * (2.0 * sigma / (nf * s1)).sqrt();
    let tail = (sigma * s1 / nf).sqrt() * (1.0 - 0.5 * (nf * sigma / s1).sqrt()).powi(2 * n as i32);
    0.5 * sigma * rate.powi(k as i32) * dist0_sq - tail
}

/// Whether the span argument behind the lower bound applies to a run on
/// `h` started at `x0`: the matrix must be tridiagonal (so one coordinate
/// query extends the reachable prefix by at most one) and the start must
/// be the origin (so the reachable set begins empty).
pub fn span_audit(h: &CsrMatrix, x0: &[f64]) -> bool {
    if x0.iter().any(|&v| v != 0.0) {
        return false;
    }
    for i in 0..h.nrows() {
        let (cols, _) = h.row(i);
        for &j in cols {
            if j + 1 < i || j > i + 1 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{cdm_run, quadratic_value};
    use crate::dense::symmetric_eigenvalues;

    #[test]
    fn minimizer_is_exact() {
        for &(n, sigma, s1) in &[(50, 0.01, 4.0), (20, 0.05, 6.0), (7, 1.0, 40.0)] {
            let inst = make_hard_instance(n, sigma, s1).unwrap();
            let grad = inst.matrix.mul_vec(&inst.x_star);
            for i in 0..n {
                assert!(
                    (grad[i] - inst.rhs[i]).abs() < 1e-12,
                    "n={n}: residual {} at {i}",
                    grad[i] - inst.rhs[i]
                );
            }
        }
    }

    #[test]
    fn q_solves_the_recurrence_and_stays_bracketed() {
        for &(n, sigma, s1) in &[(50, 0.01, 4.0), (100, 0.001, 1.0), (10, 0.2, 9.0)] {
            let inst = make_hard_instance(n, sigma, s1).unwrap();
            let a = inst.l / (inst.l - sigma);
            assert!((inst.q * inst.q - 2.0 * a * inst.q + 1.0).abs() < 1e-12);
            assert!(inst.q >= 1.0 - (2.0 * sigma / inst.l).sqrt() - 1e-12);
            assert!(inst.q <= 1.0 - 0.5 * (sigma / inst.l).sqrt() + 1e-12);
        }
    }

    #[test]
    fn spectrum_matches_the_closed_form() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(j pi / (n+1)).
        let inst = make_hard_instance(12, 0.1, 8.0).unwrap();
        let eigs = symmetric_eigenvalues(&inst.matrix).unwrap();
        let mut expected: Vec<f64> = (1..=12)
            .map(|j| {
                let t = 2.0 - 2.0 * (std::f64::consts::PI * j as f64 / 13.0).cos();
                (inst.l - inst.sigma) / 2.0 * t + inst.sigma
            })
            .collect();
        expected.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut got = eigs.clone();
        got.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-10);
        }
        assert!(got[0] >= inst.sigma);
    }

    #[test]
    fn every_coordinate_has_the_same_lipschitz_constant() {
        let inst = make_hard_instance(30, 0.02, 5.0).unwrap();
        for i in 0..30 {
            assert!((inst.matrix.diagonal(i) - inst.l).abs() < 1e-15);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(make_hard_instance(1, 0.1, 100.0).is_err());
        assert!(make_hard_instance(10, 0.0, 100.0).is_err());
        // S_1 = 4 sigma n exactly is out of range.
        assert!(make_hard_instance(10, 1.0, 40.0).is_err());
        assert!(make_hard_instance(10, 1.0, 40.1).is_ok());
    }

    #[test]
    fn audit_accepts_the_instance_and_rejects_violations() {
        let inst = make_hard_instance(15, 0.1, 9.0).unwrap();
        assert!(span_audit(&inst.matrix, &vec![0.0; 15]));
        let mut x0 = vec![0.0; 15];
        x0[3] = 1e-9;
        assert!(!span_audit(&inst.matrix, &x0));
        let dense = CsrMatrix::from_dense(&vec![vec![1.0; 4]; 4]).unwrap();
        assert!(!span_audit(&dense, &vec![0.0; 4]));
    }

    #[test]
    fn curve_starts_below_the_true_gap_and_decays() {
        let inst = make_hard_instance(40, 0.02, 4.0).unwrap();
        let f_star = quadratic_value(&inst.matrix, &inst.rhs, &inst.x_star);
        let gap0 = quadratic_value(&inst.matrix, &inst.rhs, &vec![0.0; 40]) - f_star;
        let dist0: f64 = inst.x_star.iter().map(|x| x * x).sum();
        assert!(lower_bound_curve(40, 0.02, 4.0, dist0, 0) <= gap0);
        let mut prev = f64::INFINITY;
        for k in [0, 10, 100, 400] {
            let b = lower_bound_curve(40, 0.02, 4.0, dist0, k);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn uniform_coordinate_descent_respects_the_bound() {
        // A light version of the full experiment: the plain method's mean
        // gap must sit above the accelerated-rate floor at every probe.
        let (n, sigma, s1) = (20, 0.05, 6.0);
        let inst = make_hard_instance(n, sigma, s1).unwrap();
        let f_star = quadratic_value(&inst.matrix, &inst.rhs, &inst.x_star);
        let dist0: f64 = inst.x_star.iter().map(|x| x * x).sum();
        let x0 = vec![0.0; n];
        assert!(span_audit(&inst.matrix, &x0));
        for &k in &[25usize, 100, 200] {
            let mut mean = 0.0;
            for seed in 0..30 {
                let run = cdm_run(&inst.matrix, &inst.rhs, &x0, 0.0, k, seed, None, 0).unwrap();
                mean += quadratic_value(&inst.matrix, &inst.rhs, &run.x) - f_star;
            }
            mean /= 30.0;
            let floor = lower_bound_curve(n, sigma, s1, dist0, k);
            assert!(
                mean >= floor,
                "k={k}: mean gap {mean:.3e} under floor {floor:.3e}"
            );
        }
    }
}
