//! Sampling thresholds and the accelerated coefficient schedule.
//!
//! Thresholding: with exponent `a`, coordinate `i` is sampled proportionally
//! to `max(L_i^a, S_a/n)` where `S_a = sum L_i^a`. Raising the small
//! constants to the threshold `(S_a/n)^(1/a)` caps the probability floor at
//! `1/(2n)` while at most doubling the total weight: `S~_a <= 2 S_a`. The
//! step sizes then use the raised constants `L~_i`.
//!
//! The coefficient schedule generates the triples `(gamma_k, beta_k,
//! alpha_k)` of the accelerated iteration. They satisfy, with `s~ = S~_a`
//! and `sigma` the strong convexity modulus in the `(1-a)`-weighted norm,
//!
//! ```text
//! gamma_k^2 - gamma_k/(2n) = beta_k gamma_{k-1}^2,
//! beta_k  = 1 - gamma_k sigma / s~,
//! alpha_k = beta_k / (beta_k + 2 n gamma_k - 1),
//! ```
//!
//! seeded by `gamma_{-1} = a_0/b_0 = (1/(2n))/2 = 1/(4n)`. Solving the
//! quadratic for `gamma_k` gives a one-step map which is a contraction with
//! fixed point `sqrt(s~/(2 n sigma))`; the min with the fixed point below
//! is pure floating-point hygiene. The auxiliary scalars `a_k, b_k`
//! (estimate-sequence growth factors, `b_{k+1} = b_k / sqrt(beta_k)`,
//! `a_{k+1} = gamma_k b_{k+1}`) grow exponentially, so they are kept under
//! an explicit power-of-two rescaling that preserves their ratio exactly.

use crate::error::{Error, Result};

/// Raised coordinate constants for sampling exponent `exponent`.
#[derive(Debug, Clone)]
pub struct ThresholdedLipschitz {
    /// `L~_i`: step-size constants after raising to the threshold.
    pub l_tilde: Vec<f64>,
    /// `L~_i^a`: sampling weights.
    pub weights: Vec<f64>,
    /// `S~_a = sum_i L~_i^a`.
    pub s_tilde: f64,
    /// `S_a = sum_i L_i^a` of the unmodified constants.
    pub s_plain: f64,
}

/// Computes raised constants and sampling weights.
///
/// `exponent = 0` is the uniform-sampling special case: every weight is 1,
/// `S~_0 = n`, and the step-size constants are left untouched (the
/// threshold `(S_0/n)^(1/0)` is meaningless, but the probability floor
/// `1/(2n)` already holds with equality, so no raising is needed).
pub fn thresholded_lipschitz(lipschitz: &[f64], exponent: f64) -> Result<ThresholdedLipschitz> {
    let n = lipschitz.len();
    if n == 0 {
        return Err(Error::invalid("need at least one coordinate"));
    }
    if !(0.0..=1.0).contains(&exponent) {
        return Err(Error::invalid(format!(
            "sampling exponent {exponent} must lie in [0, 1]"
        )));
    }
    for (i, &l) in lipschitz.iter().enumerate() {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::invalid(format!(
                "Lipschitz constant {l} at coordinate {i} must be finite and positive"
            )));
        }
    }
    if exponent == 0.0 {
        return Ok(ThresholdedLipschitz {
            l_tilde: lipschitz.to_vec(),
            weights: vec![1.0; n],
            s_tilde: n as f64,
            s_plain: n as f64,
        });
    }
    let s_plain: f64 = lipschitz.iter().map(|&l| l.powf(exponent)).sum();
    let threshold = (s_plain / n as f64).powf(1.0 / exponent);
    let l_tilde: Vec<f64> = lipschitz.iter().map(|&l| l.max(threshold)).collect();
    let weights: Vec<f64> = l_tilde.iter().map(|&l| l.powf(exponent)).collect();
    let s_tilde = weights.iter().sum();
    Ok(ThresholdedLipschitz {
        l_tilde,
        weights,
        s_tilde,
        s_plain,
    })
}

/// The fixed step parameter `theta = sqrt(sigma / (2 s~ n))` of the
/// constant-coefficient (simple) accelerated iteration.
pub fn simple_theta(n: usize, sigma: f64, s_tilde: f64) -> f64 {
    (sigma / (2.0 * s_tilde * n as f64)).sqrt()
}

/// One frame of the adaptive schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffFrame {
    pub gamma: f64,
    pub beta: f64,
    pub alpha: f64,
}

/// The adaptive coefficient schedule (state after `k` advances holds the
/// frame of iteration `k`).
#[derive(Debug, Clone)]
pub struct CoefficientState {
    n: f64,
    sigma_over_s: f64,
    cap: f64,
    frame: CoeffFrame,
    gamma_prev: f64,
    a: f64,
    b: f64,
    /// Count of 2^-512 rescalings applied to (a, b); the true values are
    /// `a * 2^(512 scale)` etc. Rescaling is exact and ratio-preserving.
    scale: i64,
    k: usize,
}

impl CoefficientState {
    /// Requires `0 < sigma <= 2 n s_tilde` (equivalently `theta <= 1`).
    pub fn new(n: usize, sigma: f64, s_tilde: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one coordinate"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(format!(
                "strong convexity modulus {sigma} must be finite and positive"
            )));
        }
        if !(s_tilde.is_finite() && s_tilde > 0.0) {
            return Err(Error::invalid("total sampling weight must be positive"));
        }
        if sigma > 2.0 * n as f64 * s_tilde {
            return Err(Error::invalid(format!(
                "sigma {sigma} exceeds 2 n S~ = {}; the modulus cannot be that large",
                2.0 * n as f64 * s_tilde
            )));
        }
        let nf = n as f64;
        let sigma_over_s = sigma / s_tilde;
        let mut state = CoefficientState {
            n: nf,
            sigma_over_s,
            cap: (s_tilde / (2.0 * nf * sigma)).sqrt(),
            frame: CoeffFrame {
                gamma: 0.0,
                beta: 0.0,
                alpha: 0.0,
            },
            gamma_prev: 1.0 / (4.0 * nf),
            a: 1.0 / (2.0 * nf),
            b: 2.0,
            scale: 0,
            k: 0,
        };
        state.frame = state.next_frame(state.gamma_prev);
        Ok(state)
    }

    fn next_frame(&self, gamma_prev: f64) -> CoeffFrame {
        let inv2n = 1.0 / (2.0 * self.n);
        let c = inv2n - gamma_prev * gamma_prev * self.sigma_over_s;
        let root = 0.5 * (c + (c * c + 4.0 * gamma_prev * gamma_prev).sqrt());
        let gamma = root.min(self.cap);
        let beta = 1.0 - gamma * self.sigma_over_s;
        let alpha = beta / (beta + 2.0 * self.n * gamma - 1.0);
        CoeffFrame { gamma, beta, alpha }
    }

    /// The frame of the current iteration `k`.
    pub fn frame(&self) -> CoeffFrame {
        self.frame
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    /// Advances to iteration `k + 1`.
    pub fn advance(&mut self) {
        // Growth factors first: b_{k+1} = b_k / sqrt(beta_k), a_{k+1} =
        // gamma_k b_{k+1}. Rescale by an exact power of two before they can
        // overflow; the ratio a/b, which seeds the recurrence, is untouched.
        self.b /= self.frame.beta.sqrt();
        self.a = self.frame.gamma * self.b;
        if self.b > 2.0f64.powi(512) {
            self.a *= 2.0f64.powi(-512);
            self.b *= 2.0f64.powi(-512);
            self.scale += 1;
        }
        self.gamma_prev = self.frame.gamma;
        self.frame = self.next_frame(self.gamma_prev);
        self.k += 1;
    }

    /// Growth factor `a_k`, valid while no rescaling has occurred.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Growth factor `b_k`, valid while no rescaling has occurred.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn rescalings(&self) -> i64 {
        self.scale
    }

    /// The fixed point `sqrt(s~ / (2 n sigma))` that `gamma_k` increases to.
    pub fn gamma_cap(&self) -> f64 {
        self.cap
    }

    /// Limit of `beta_k`: `1 - sqrt(sigma / (2 s~ n))`.
    pub fn beta_limit(&self) -> f64 {
        1.0 - self.cap * self.sigma_over_s
    }

    /// Residual of the defining identity
    /// `gamma_k^2 - gamma_k/(2n) - beta_k (a_k/b_k)^2` where `a_k/b_k` is
    /// the previous gamma; zero up to rounding by construction.
    pub fn identity_residual(&self) -> f64 {
        let g = self.frame.gamma;
        let ratio = self.a / self.b;
        g * g - g / (2.0 * self.n) - self.frame.beta * ratio * ratio
    }

    /// One application of the gamma map, exposed for convergence tests.
    pub fn gamma_map(&self, gamma: f64) -> f64 {
        self.next_frame(gamma).gamma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        let t = thresholded_lipschitz(&[10.0, 0.1], 1.0).unwrap();
        assert!((t.s_plain - 10.1).abs() < 1e-12);
        assert!((t.l_tilde[0] - 10.0).abs() < 1e-12);
        assert!((t.l_tilde[1] - 5.05).abs() < 1e-12);
        assert!((t.s_tilde - 15.05).abs() < 1e-12);

        let t = thresholded_lipschitz(&[4.0, 1.0], 0.5).unwrap();
        assert!((t.s_plain - 3.0).abs() < 1e-12);
        // Threshold (3/2)^2 = 2.25 raises the second constant.
        assert!((t.l_tilde[0] - 4.0).abs() < 1e-12);
        assert!((t.l_tilde[1] - 2.25).abs() < 1e-12);
        assert!((t.weights[0] - 2.0).abs() < 1e-12);
        assert!((t.weights[1] - 1.5).abs() < 1e-12);
        assert!((t.s_tilde - 3.5).abs() < 1e-12);
    }

    #[test]
    fn exponent_zero_is_uniform() {
        let t = thresholded_lipschitz(&[10.0, 0.1, 3.0], 0.0).unwrap();
        assert_eq!(t.weights, vec![1.0, 1.0, 1.0]);
        assert_eq!(t.s_tilde, 3.0);
        // Step sizes keep the raw constants.
        assert_eq!(t.l_tilde, vec![10.0, 0.1, 3.0]);
    }

    #[test]
    fn threshold_at_most_doubles_total_weight() {
        let mut rng = crate::rng::rng_from_seed(8);
        use rand::Rng;
        for _ in 0..200 {
            let n = rng.gen_range(1..40);
            let l: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
            let a = rng.gen_range(0.0..=1.0);
            let t = thresholded_lipschitz(&l, a).unwrap();
            assert!(t.s_tilde <= 2.0 * t.s_plain + 1e-9 * t.s_plain);
            assert!(t.s_tilde >= t.s_plain - 1e-9 * t.s_plain);
            // Probability floor: each weight is at least S~/(2n).
            for &w in &t.weights {
                assert!(w >= t.s_tilde / (2.0 * n as f64) - 1e-12 * t.s_tilde);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(thresholded_lipschitz(&[], 1.0).is_err());
        assert!(thresholded_lipschitz(&[1.0], -0.1).is_err());
        assert!(thresholded_lipschitz(&[1.0], 1.1).is_err());
        assert!(thresholded_lipschitz(&[0.0], 1.0).is_err());
        assert!(thresholded_lipschitz(&[f64::NAN], 1.0).is_err());
    }

    /// Independent root-finder for the gamma quadratic
    /// `g^2 - g/(2n) = (1 - g sigma/s) p^2`, used as an oracle below.
    fn gamma_by_bisection(n: f64, sigma: f64, s: f64, prev: f64) -> f64 {
        let h = |g: f64| g * g - g / (2.0 * n) - (1.0 - g * sigma / s) * prev * prev;
        let (mut lo, mut hi) = (1.0 / (2.0 * n), 10.0 * (s / (2.0 * n * sigma)).sqrt() + 1.0);
        assert!(h(lo) <= 0.0 && h(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn first_frame_hand_values() {
        // n = 1, sigma = 1, s~ = 2, seeded at gamma_{-1} = 1/4.
        let st = CoefficientState::new(1, 1.0, 2.0).unwrap();
        let f = st.frame();
        assert!((f.gamma - 0.577058).abs() < 1e-5, "gamma {}", f.gamma);
        assert!((f.beta - 0.711471).abs() < 1e-5, "beta {}", f.beta);
        assert!((f.alpha - 0.821950).abs() < 1e-5, "alpha {}", f.alpha);
        let oracle = gamma_by_bisection(1.0, 1.0, 2.0, 0.25);
        assert!((f.gamma - oracle).abs() < 1e-9);
    }

    #[test]
    fn frames_match_bisection_oracle() {
        let mut rng = crate::rng::rng_from_seed(14);
        use rand::Rng;
        for _ in 0..20 {
            let n = rng.gen_range(1..200);
            let s: f64 = rng.gen_range(1.0..100.0);
            let sigma = s * 10f64.powf(rng.gen_range(-6.0..0.0));
            let mut st = CoefficientState::new(n, sigma, s).unwrap();
            let mut prev = 1.0 / (4.0 * n as f64);
            for _ in 0..50 {
                let oracle = gamma_by_bisection(n as f64, sigma, s, prev).min(st.gamma_cap());
                let got = st.frame().gamma;
                assert!(
                    (got - oracle).abs() < 1e-9 * (1.0 + oracle),
                    "gamma {got} vs bisection {oracle}"
                );
                prev = got;
                st.advance();
            }
        }
    }

    #[test]
    fn gamma_increases_to_cap_beta_decreases() {
        let mut st = CoefficientState::new(20, 0.3, 50.0).unwrap();
        let cap = st.gamma_cap();
        let beta_limit = st.beta_limit();
        let mut last_gamma = 0.0;
        let mut last_beta = 1.0;
        for _ in 0..100_000 {
            let f = st.frame();
            assert!(f.gamma >= 1.0 / (2.0 * 20.0) - 1e-15);
            assert!(f.gamma <= cap + 1e-12);
            assert!(f.gamma >= last_gamma - 1e-15, "gamma must not decrease");
            assert!(f.beta <= last_beta + 1e-15, "beta must not increase");
            last_gamma = f.gamma;
            last_beta = f.beta;
            st.advance();
        }
        assert!((last_gamma - cap).abs() < 1e-9 * cap);
        assert!((last_beta - beta_limit).abs() < 1e-9);
    }

    #[test]
    fn convergence_speed_to_cap() {
        // |gamma_k - cap| < 1e-9 once k >= 50 sqrt(2 s~ n / sigma), over
        // random parameter draws.
        let mut rng = crate::rng::rng_from_seed(77);
        use rand::Rng;
        for _ in 0..20 {
            let n = rng.gen_range(1..100);
            let s: f64 = rng.gen_range(1.0..50.0);
            let sigma = s * 10f64.powf(rng.gen_range(-4.0..0.0));
            let mut st = CoefficientState::new(n, sigma, s).unwrap();
            let k_settle = (50.0 * (2.0 * s * n as f64 / sigma).sqrt()).ceil() as usize;
            for _ in 0..k_settle.min(10_000) {
                st.advance();
            }
            if k_settle <= 10_000 {
                assert!(
                    (st.frame().gamma - st.gamma_cap()).abs() < 1e-9 * (1.0 + st.gamma_cap()),
                    "n={n} sigma={sigma} s={s}"
                );
            }
        }
    }

    #[test]
    fn cap_is_fixed_point() {
        let st = CoefficientState::new(5, 0.7, 12.0).unwrap();
        let cap = st.gamma_cap();
        let mapped = st.gamma_map(cap);
        assert!((mapped - cap).abs() <= 1e-14 * cap);
    }

    #[test]
    fn defining_identity_holds_along_run() {
        let mut st = CoefficientState::new(10, 0.05, 25.0).unwrap();
        for _ in 0..2000 {
            let g = st.frame().gamma;
            let rel = st.identity_residual().abs() / (g * g);
            assert!(rel < 1e-12, "identity residual {rel}");
            st.advance();
        }
    }

    #[test]
    fn growth_factor_lower_bounds() {
        // a_k and b_k dominate the closed-form growth expressions built
        // from r = (1/2) sqrt(sigma/(2 s~ n)).
        let n = 6usize;
        let sigma = 0.4;
        let s = 9.0;
        let mut st = CoefficientState::new(n, sigma, s).unwrap();
        let r = 0.5 * (sigma / (2.0 * s * n as f64)).sqrt();
        let cap = st.gamma_cap();
        for k in 0..200 {
            let e = (k + 1) as i32;
            let up = (1.0 + r).powi(e);
            let down = (1.0 - r).powi(e);
            let a_bound = cap * (up - down);
            let b_bound = up + down;
            assert!(
                st.a() >= a_bound * (1.0 - 1e-9) - 1e-12,
                "a_{k} = {} below bound {a_bound}",
                st.a(),
            );
            assert!(
                st.b() >= b_bound * (1.0 - 1e-9),
                "b_{k} = {} below bound {b_bound}",
                st.b(),
            );
            st.advance();
        }
    }

    #[test]
    fn growth_factors_survive_long_runs() {
        let mut st = CoefficientState::new(3, 1e-6, 1.0).unwrap();
        for _ in 0..2_000_000 {
            st.advance();
        }
        assert!(st.a().is_finite() && st.b().is_finite());
        assert!(st.frame().gamma.is_finite());
        // The a/b ratio stays the previous gamma despite rescaling.
        let cap = st.gamma_cap();
        assert!((st.a() / st.b() - st.frame().gamma).abs() < 1e-9 * cap);
    }

    #[test]
    fn gamma_map_is_a_contraction() {
        // Numerical derivative of the map lies in [0, 1 - gamma sigma/s)
        // on the feasible range.
        let st = CoefficientState::new(8, 0.2, 10.0).unwrap();
        let cap = st.gamma_cap();
        let h = 1e-7;
        for t in 1..100 {
            let g = cap * t as f64 / 100.0;
            if g < 1.0 / (4.0 * 8.0) {
                continue;
            }
            let d = (st.gamma_map(g + h) - st.gamma_map(g - h)) / (2.0 * h);
            assert!(d >= -1e-9, "derivative {d} at {g}");
            assert!(d <= 1.0 - g * 0.2 / 10.0 + 1e-6, "derivative {d} at {g}");
        }
    }

    #[test]
    fn rejects_oversized_sigma() {
        assert!(CoefficientState::new(2, 100.0, 1.0).is_err());
        assert!(CoefficientState::new(2, 4.0, 1.0).is_ok()); // boundary 2 n s~
    }
}
