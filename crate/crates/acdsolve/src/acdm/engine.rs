//! The accelerated coordinate descent engine.
//!
//! One iteration, in explicit form, with `g = f_{i}(y_k)` for a sampled
//! coordinate `i` and raised constants `L~`:
//!
//! ```text
//! x_{k+1} = y_k - (1/L~_i) g e_i
//! v_{k+1} = beta_k v_k + (1 - beta_k) y_k - (gamma_k / L~_i) g e_i
//! y_{k+1} = alpha_{k+1} v_{k+1} + (1 - alpha_{k+1}) x_{k+1}
//! ```
//!
//! Eliminating `x` turns the `(v, y)` pair into an affine map plus a
//! one-coordinate source term,
//!
//! ```text
//! A_k = [ beta_k                1 - beta_k              ]
//!       [ alpha_{k+1} beta_k    1 - alpha_{k+1} beta_k  ]
//! s_k = ( gamma_k,  1 - alpha_{k+1} + alpha_{k+1} gamma_k ) g / L~_i  on e_i,
//! ```
//!
//! which the engine realizes implicitly through [`ImplicitPair`]: per
//! iteration it performs exactly one oracle partial query, two register
//! increments, and O(1) scalar arithmetic. The constant-coefficient
//! (simple) mode replaces the schedule by the fixed `theta`:
//!
//! ```text
//! y_k     = (theta v_k + x_k) / (1 + theta)
//! x_{k+1} = y_k - (1/L~_i) g e_i
//! v_{k+1} = (1-theta) v_k + theta y_k - (S~ theta / (sigma L~_i)) g e_i
//! ```
//!
//! whose induced 2x2 map is also row-stochastic. The `x` iterate is never
//! stored; it is recovered on demand from `x = (y - alpha v)/(1 - alpha)`
//! (adaptive mode) or `x = (1+theta) y - theta v` (simple mode).

use rand::Rng;

use crate::acdm::coeffs::{
    simple_theta, thresholded_lipschitz, CoeffFrame, CoefficientState, ThresholdedLipschitz,
};
use crate::acdm::pair::ImplicitPair;
use crate::acdm::trace::{ConvergenceTrace, OpCounts, TraceRow};
use crate::error::{Error, Result};
use crate::oracle::{CoordinateOracle, Register};
use crate::rng::{rng_from_seed, SolverRng};
use crate::sampler::AliasSampler;
use rand_distr::StandardNormal;

/// Coefficient schedule selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Fixed `theta = sqrt(sigma/(2 S~ n))`; slightly worse constants,
    /// no per-iteration schedule state.
    Simple,
    /// The adaptive `(gamma, beta, alpha)` schedule.
    Stable,
}

/// Termination rule for [`run`].
#[derive(Debug, Clone, Copy)]
pub enum StopRule {
    /// Run exactly this many iterations.
    Iterations(usize),
    /// Run to a uniformly random iteration in `[k, 2k - 1]`; the window
    /// start `k` is the field. Appropriate when the target is a small
    /// gradient norm rather than a small value gap.
    GradientWindow { window_start: usize },
    /// Stop once `f(x_k) - f_star <= rel_tol * (f(x_0) - f_star)`, checking
    /// every `check_every` iterations (0 = every `ceil(n/4)`), giving up
    /// after `max_iters`. Requires `f_star` in the config.
    ValueGap { rel_tol: f64, max_iters: usize },
}

/// Additive per-iteration perturbations for robustness experiments: after
/// each step, `x` gains a vector of weighted norm `eps1` and `v` one of
/// weighted norm `eps2` (the norm with weights `L_i^(1-a)`). Forces O(n)
/// work per iteration; intended for tests.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub eps1: f64,
    pub eps2: f64,
}

#[derive(Debug, Clone)]
pub struct AcdmConfig {
    /// Sampling exponent `a` in [0, 1].
    pub exponent: f64,
    /// Strong convexity modulus of `f` in the `(1-a)`-weighted norm.
    pub sigma: f64,
    pub mode: Mode,
    pub stop: StopRule,
    pub seed: u64,
    /// Record a trace row every this many iterations (0 = only first/last).
    pub record_every: usize,
    /// Known optimal value; enables `f_gap` trace entries and value-gap
    /// stopping.
    pub f_star: Option<f64>,
    /// Sample the squared dual gradient norm every `ceil(n/4)` iterations
    /// into the trace.
    pub track_gradient: bool,
    pub noise: Option<NoiseSpec>,
}

impl AcdmConfig {
    /// A plain fixed-iteration configuration with the adaptive schedule.
    pub fn iterations(exponent: f64, sigma: f64, iters: usize, seed: u64) -> Self {
        AcdmConfig {
            exponent,
            sigma,
            mode: Mode::Stable,
            stop: StopRule::Iterations(iters),
            seed,
            record_every: 0,
            f_star: None,
            track_gradient: false,
            noise: None,
        }
    }
}

/// Outcome of a run.
#[derive(Debug, Clone)]
pub struct AcdmRun {
    /// The `x` iterate at the stopping iteration.
    pub x: Vec<f64>,
    /// Iterations actually performed.
    pub iterations: usize,
    /// Coefficients `(c_u, c_w)` such that `x = c_u u + c_w w` over the
    /// oracle registers at exit (lets matrix-free callers map `x` through
    /// cached register images instead of materializing).
    pub x_combo: (f64, f64),
    pub trace: ConvergenceTrace,
    pub counts: OpCounts,
    /// Mean of the sampled squared dual gradient norms inside the stopping
    /// window (gradient-window runs with `track_gradient` only).
    pub grad_window_mean: Option<f64>,
}

/// The engine, stepping an oracle one coordinate update at a time. Most
/// callers use [`run`]; the flow solver drives an engine manually to
/// interleave its own certificate checks.
pub struct AcdmEngine<'o, O: CoordinateOracle> {
    oracle: &'o mut O,
    mode: Mode,
    thresholds: ThresholdedLipschitz,
    /// Weights `L_i^(1-a)` of the convergence norm (original constants).
    norm_weights: Vec<f64>,
    sigma: f64,
    theta: f64,
    schedule: CoefficientState,
    frame: CoeffFrame,
    sampler: AliasSampler,
    pair: ImplicitPair,
    rng: SolverRng,
    counts: OpCounts,
    noise: Option<NoiseSpec>,
    k: usize,
}

impl<'o, O: CoordinateOracle> AcdmEngine<'o, O> {
    pub fn new(oracle: &'o mut O, x0: &[f64], cfg: &AcdmConfig) -> Result<Self> {
        let n = oracle.dim();
        if x0.len() != n {
            return Err(Error::invalid("x0 length does not match oracle dimension"));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("x0 must be finite"));
        }
        let lipschitz: Vec<f64> = (0..n).map(|i| oracle.lipschitz(i)).collect();
        let thresholds = thresholded_lipschitz(&lipschitz, cfg.exponent)?;
        let norm_weights: Vec<f64> = lipschitz
            .iter()
            .map(|&l| l.powf(1.0 - cfg.exponent))
            .collect();
        let schedule = CoefficientState::new(n, cfg.sigma, thresholds.s_tilde)?;
        let frame = schedule.frame();
        let theta = simple_theta(n, cfg.sigma, thresholds.s_tilde);
        let sampler = AliasSampler::new(&thresholds.weights)?;
        oracle.set_registers(x0, x0);
        Ok(AcdmEngine {
            oracle,
            mode: cfg.mode,
            thresholds,
            norm_weights,
            sigma: cfg.sigma,
            theta,
            schedule,
            frame,
            sampler,
            pair: ImplicitPair::identity(),
            rng: rng_from_seed(cfg.seed),
            counts: OpCounts::default(),
            noise: cfg.noise,
            k: 0,
        })
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    pub fn counts(&self) -> OpCounts {
        self.counts
    }

    pub fn pair(&self) -> &ImplicitPair {
        &self.pair
    }

    pub fn oracle(&self) -> &O {
        self.oracle
    }

    pub fn s_tilde(&self) -> f64 {
        self.thresholds.s_tilde
    }

    pub fn rng_mut(&mut self) -> &mut SolverRng {
        &mut self.rng
    }

    /// Coefficients of the current `x` iterate over the registers.
    pub fn x_combo(&self) -> (f64, f64) {
        let (v0, v1) = self.pair.v_row();
        let (y0, y1) = self.pair.y_row();
        match self.mode {
            Mode::Stable => {
                let a = self.frame.alpha;
                ((y0 - a * v0) / (1.0 - a), (y1 - a * v1) / (1.0 - a))
            }
            Mode::Simple => {
                let t = self.theta;
                ((1.0 + t) * y0 - t * v0, (1.0 + t) * y1 - t * v1)
            }
        }
    }

    /// Materializes the current `x` iterate; O(n).
    pub fn current_x(&self) -> Vec<f64> {
        let (cu, cw) = self.x_combo();
        let (u, w) = self.oracle.registers();
        u.iter().zip(w).map(|(&ui, &wi)| cu * ui + cw * wi).collect()
    }

    /// Materializes the current `(v, y)` pair; O(n).
    pub fn current_pair(&self) -> (Vec<f64>, Vec<f64>) {
        self.pair.materialize(self.oracle)
    }

    /// Squared dual norm of the full gradient at the current `y`, with
    /// weights `L_i^-(1-a)`; O(n) partial queries.
    pub fn gradient_norm_sq(&mut self) -> f64 {
        let (c1, c2) = self.pair.y_row();
        self.counts.gradient_evals += 1;
        let g = self.oracle.full_gradient(c1, c2);
        g.iter()
            .zip(&self.norm_weights)
            .map(|(&gi, &wi)| gi * gi / wi)
            .sum()
    }

    /// Objective value at the current `x`; O(n) + one `value` call.
    pub fn current_value(&mut self) -> f64 {
        self.counts.value_evals += 1;
        let x = self.current_x();
        self.oracle.value(&x)
    }

    /// One iteration. Returns the updated coordinate.
    pub fn step(&mut self) -> Result<usize> {
        if self.pair.needs_renormalization() {
            self.pair.renormalize(self.oracle);
            self.counts.renormalizations += 1;
        }
        let i = self.sampler.sample(&mut self.rng);
        let (c1, c2) = self.pair.y_row();
        let g = self.oracle.partial(i, c1, c2);
        self.counts.partials += 1;
        if !g.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite partial derivative at iteration {}, coordinate {i}",
                self.k
            )));
        }
        let li = self.thresholds.l_tilde[i];

        let (a_mat, s, alpha_next) = match self.mode {
            Mode::Stable => {
                let cur = self.frame;
                self.schedule.advance();
                let next = self.schedule.frame();
                let a_mat = [
                    [cur.beta, 1.0 - cur.beta],
                    [next.alpha * cur.beta, 1.0 - next.alpha * cur.beta],
                ];
                let s = [
                    cur.gamma / li * g,
                    (1.0 - next.alpha + next.alpha * cur.gamma) / li * g,
                ];
                self.frame = next;
                (a_mat, s, next.alpha)
            }
            Mode::Simple => {
                let t = self.theta;
                let a_mat = [
                    [1.0 - t, t],
                    [t * (1.0 - t) / (1.0 + t), (1.0 + t * t) / (1.0 + t)],
                ];
                let s = [
                    self.thresholds.s_tilde * t / (self.sigma * li) * g,
                    (self.thresholds.s_tilde * t * t / self.sigma + 1.0) / ((1.0 + t) * li) * g,
                ];
                (a_mat, s, f64::NAN)
            }
        };

        self.pair.apply_left(a_mat);
        let d = self.pair.solve([-s[0], -s[1]]);
        self.oracle.notify_increment(Register::U, i, d[0]);
        self.oracle.notify_increment(Register::W, i, d[1]);
        self.counts.increments += 2;

        if let Some(noise) = self.noise {
            self.inject_noise(noise, alpha_next);
        }

        self.k += 1;
        self.counts.iterations += 1;
        Ok(i)
    }

    /// Adds perturbations of prescribed weighted norm to the just-computed
    /// `x_{k+1}` and `v_{k+1}`. Expressed on the registers this is a dense
    /// update, so the oracle caches are rebuilt; O(n + rebuild).
    fn inject_noise(&mut self, noise: NoiseSpec, alpha_next: f64) {
        let n = self.norm_weights.len();
        let eps1 = self.random_direction_with_norm(n, noise.eps1);
        let eps2 = self.random_direction_with_norm(n, noise.eps2);

        // x gains eps1 and v gains eps2; through y = alpha v + (1-alpha) x
        // the (v, y) pair therefore gains (eps2, alpha eps2 + (1-alpha) eps1).
        let (tv, ty): (Vec<f64>, Vec<f64>) = match self.mode {
            Mode::Stable => {
                let a = alpha_next;
                (
                    eps2.clone(),
                    eps1
                        .iter()
                        .zip(&eps2)
                        .map(|(&e1, &e2)| a * e2 + (1.0 - a) * e1)
                        .collect(),
                )
            }
            Mode::Simple => {
                let t = self.theta;
                (
                    eps2.clone(),
                    eps1
                        .iter()
                        .zip(&eps2)
                        .map(|(&e1, &e2)| (t * e2 + e1) / (1.0 + t))
                        .collect(),
                )
            }
        };
        let (u, w) = self.oracle.registers();
        let mut nu = u.to_vec();
        let mut nw = w.to_vec();
        for j in 0..n {
            let d = self.pair.solve([tv[j], ty[j]]);
            nu[j] += d[0];
            nw[j] += d[1];
        }
        self.oracle.set_registers(&nu, &nw);
        self.counts.noise_injections += 1;
    }

    fn random_direction_with_norm(&mut self, n: usize, radius: f64) -> Vec<f64> {
        if radius == 0.0 {
            return vec![0.0; n];
        }
        let g: Vec<f64> = (0..n).map(|_| self.rng.sample(StandardNormal)).collect();
        let norm_sq: f64 = g
            .iter()
            .zip(&self.norm_weights)
            .map(|(&gi, &wi)| wi * gi * gi)
            .sum();
        let scale = radius / norm_sq.sqrt().max(f64::MIN_POSITIVE);
        g.into_iter().map(|v| v * scale).collect()
    }
}

/// Runs the engine to completion under the configured stop rule.
pub fn run<O: CoordinateOracle>(oracle: &mut O, x0: &[f64], cfg: &AcdmConfig) -> Result<AcdmRun> {
    let start = std::time::Instant::now();
    let mut engine = AcdmEngine::new(oracle, x0, cfg)?;
    let n = engine.thresholds.l_tilde.len();
    let grad_stride = n.div_ceil(4).max(1);
    let mut trace = ConvergenceTrace::new();
    let mut grad_samples: Vec<f64> = Vec::new();

    let (total_iters, window_start, check_every, rel_tol) = match cfg.stop {
        StopRule::Iterations(k) => (k, usize::MAX, 0usize, 0.0),
        StopRule::GradientWindow { window_start } => {
            if window_start == 0 {
                return Err(Error::invalid("gradient window must start at k >= 1"));
            }
            let j = engine.rng_mut().gen_range(window_start..2 * window_start);
            (j, window_start, 0usize, 0.0)
        }
        StopRule::ValueGap { rel_tol, max_iters } => {
            if cfg.f_star.is_none() {
                return Err(Error::invalid("value-gap stopping needs f_star"));
            }
            let ce = n.div_ceil(4).max(1);
            (max_iters, usize::MAX, ce, rel_tol)
        }
    };

    let gap0 = cfg.f_star.map(|fs| engine.current_value() - fs);
    trace.push(TraceRow {
        k: 0,
        f_gap: gap0.unwrap_or(f64::NAN),
        grad_sq: f64::NAN,
        coord: -1,
        wall_ns: start.elapsed().as_nanos(),
    });

    let mut iterations = 0usize;
    while iterations < total_iters {
        let coord = engine.step()?;
        iterations += 1;

        let mut f_gap = f64::NAN;
        let mut grad_sq = f64::NAN;
        let mut record = cfg.record_every > 0 && iterations % cfg.record_every == 0;

        if cfg.track_gradient && iterations % grad_stride == 0 {
            grad_sq = engine.gradient_norm_sq();
            if iterations >= window_start {
                grad_samples.push(grad_sq);
            }
            record = record || cfg.record_every > 0;
        }

        if check_every > 0 && iterations % check_every == 0 {
            let gap = engine.current_value() - cfg.f_star.expect("checked above");
            f_gap = gap;
            if gap <= rel_tol * gap0.expect("f_star present") {
                if f_gap.is_nan() {
                    f_gap = gap;
                }
                trace.push(TraceRow {
                    k: iterations as u64,
                    f_gap,
                    grad_sq,
                    coord: coord as i64,
                    wall_ns: start.elapsed().as_nanos(),
                });
                break;
            }
        }

        if record {
            if f_gap.is_nan() {
                if let Some(fs) = cfg.f_star {
                    f_gap = engine.current_value() - fs;
                }
            }
            trace.push(TraceRow {
                k: iterations as u64,
                f_gap,
                grad_sq,
                coord: coord as i64,
                wall_ns: start.elapsed().as_nanos(),
            });
        }
    }

    let final_gap = cfg.f_star.map(|fs| engine.current_value() - fs);
    let last_recorded = trace.rows().last().map(|r| r.k).unwrap_or(u64::MAX);
    if last_recorded != iterations as u64 {
        trace.push(TraceRow {
            k: iterations as u64,
            f_gap: final_gap.unwrap_or(f64::NAN),
            grad_sq: f64::NAN,
            coord: -1,
            wall_ns: start.elapsed().as_nanos(),
        });
    }

    let x = engine.current_x();
    let x_combo = engine.x_combo();
    let counts = engine.counts();
    let grad_window_mean = if grad_samples.is_empty() {
        None
    } else {
        Some(grad_samples.iter().sum::<f64>() / grad_samples.len() as f64)
    };
    Ok(AcdmRun {
        x,
        iterations,
        x_combo,
        trace,
        counts,
        grad_window_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csr::CsrMatrix;
    use crate::dense::spd_solve;
    use crate::oracle::{spd_parameters, SpdQuadraticOracle};

    /// tridiag(-1, 3, -1): SPD, lambda in (1, 5), uniform L_i = 3.
    fn tridiag_instance(n: usize) -> (CsrMatrix, Vec<f64>) {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 3.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t).unwrap();
        let b = vec![1.0; n];
        (a, b)
    }

    fn gap_at(oracle: &SpdQuadraticOracle, x: &[f64]) -> f64 {
        let xs = spd_solve(oracle.matrix(), oracle.rhs()).unwrap();
        oracle.value(x) - oracle.value(&xs)
    }

    /// Max-norm distance to the exact minimizer. Preferred over the value
    /// gap for "converged to machine precision" checks: the gap itself
    /// bottoms out at eps * |f*| from evaluation roundoff.
    fn dist_to_optimum(oracle: &SpdQuadraticOracle, x: &[f64]) -> f64 {
        let xs = spd_solve(oracle.matrix(), oracle.rhs()).unwrap();
        x.iter()
            .zip(&xs)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn stable_mode_converges_on_small_spd() {
        let (a, b) = tridiag_instance(10);
        let sigma = spd_parameters(&a).unwrap().sigma;
        let mut oracle = SpdQuadraticOracle::new(a, b).unwrap();
        let cfg = AcdmConfig::iterations(1.0, sigma, 3000, 7);
        let run = run(&mut oracle, &vec![0.0; 10], &cfg).unwrap();
        assert_eq!(run.iterations, 3000);
        assert!(gap_at(&oracle, &run.x) < 1e-13);
        assert!(dist_to_optimum(&oracle, &run.x) < 1e-13);
    }

    #[test]
    fn simple_mode_converges_on_small_spd() {
        let (a, b) = tridiag_instance(10);
        let sigma = spd_parameters(&a).unwrap().sigma;
        let mut oracle = SpdQuadraticOracle::new(a, b).unwrap();
        let mut cfg = AcdmConfig::iterations(1.0, sigma, 3000, 7);
        cfg.mode = Mode::Simple;
        let run = run(&mut oracle, &vec![0.0; 10], &cfg).unwrap();
        assert!(gap_at(&oracle, &run.x) < 1e-13);
        assert!(dist_to_optimum(&oracle, &run.x) < 1e-13);
    }

    #[test]
    fn uniform_sampling_exponent_zero_converges() {
        let (a, b) = tridiag_instance(12);
        // Strong convexity in the L-weighted norm: A >= sigma diag(L), so
        // sigma = lambda_min(A) / 3 works for uniform L_i = 3.
        let sigma = spd_parameters(&a).unwrap().sigma / 3.0;
        let mut oracle = SpdQuadraticOracle::new(a, b).unwrap();
        let cfg = AcdmConfig::iterations(0.0, sigma, 4000, 11);
        let run = run(&mut oracle, &vec![0.0; 12], &cfg).unwrap();
        assert!(gap_at(&oracle, &run.x) < 1e-13);
        assert!(dist_to_optimum(&oracle, &run.x) < 1e-13);
    }

    #[test]
    fn same_seed_reproduces_bitwise() {
        let (a, b) = tridiag_instance(8);
        let sigma = spd_parameters(&a).unwrap().sigma;
        let mut xs = Vec::new();
        for _ in 0..2 {
            let mut oracle = SpdQuadraticOracle::new(a.clone(), b.clone()).unwrap();
            let cfg = AcdmConfig::iterations(0.5, sigma, 500, 42);
            xs.push(run(&mut oracle, &vec![0.1; 8], &cfg).unwrap().x);
        }
        assert_eq!(xs[0], xs[1]);
    }

    #[test]
    fn x_combo_matches_materialized_x() {
        let (a, b) = tridiag_instance(6);
        let sigma = spd_parameters(&a).unwrap().sigma;
        let mut oracle = SpdQuadraticOracle::new(a, b).unwrap();
        let x0 = vec![0.3; 6];
        let cfg = AcdmConfig::iterations(1.0, sigma, 137, 3);
        let mut engine = AcdmEngine::new(&mut oracle, &x0, &cfg).unwrap();
        for _ in 0..137 {
            engine.step().unwrap();
        }
        let x = engine.current_x();
        let (cu, cw) = engine.x_combo();
        let (u, w) = engine.oracle().registers();
        for i in 0..6 {
            assert!((x[i] - (cu * u[i] + cw * w[i])).abs() < 1e-15);
        }
        // And the (v, y) pair stays consistent with x = (y - a v)/(1 - a).
        let (v, y) = engine.current_pair();
        let alpha = engine.frame.alpha;
        for i in 0..6 {
            let xi = (y[i] - alpha * v[i]) / (1.0 - alpha);
            assert!((x[i] - xi).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_window_lands_in_range() {
        let (a, b) = tridiag_instance(6);
        let sigma = spd_parameters(&a).unwrap().sigma;
        for seed in 0..20 {
            let mut oracle = SpdQuadraticOracle::new(a.clone(), b.clone()).unwrap();
            let cfg = AcdmConfig {
                stop: StopRule::GradientWindow { window_start: 50 },
                track_gradient: true,
                ..AcdmConfig::iterations(1.0, sigma, 0, seed)
            };
            let run = run(&mut oracle, &vec![0.0; 6], &cfg).unwrap();
            assert!(run.iterations >= 50 && run.iterations < 100);
            assert!(run.grad_window_mean.is_some());
        }
    }

    #[test]
    fn value_gap_stops_early() {
        let (a, b) = tridiag_instance(10);
        let sigma = spd_parameters(&a).unwrap().sigma;
        let mut oracle = SpdQuadraticOracle::new(a.clone(), b.clone()).unwrap();
        let xs = spd_solve(&a, &b).unwrap();
        let f_star = oracle.value(&xs);
        let cfg = AcdmConfig {
            stop: StopRule::ValueGap {
                rel_tol: 1e-6,
                max_iters: 100_000,
            },
            f_star: Some(f_star),
            ..AcdmConfig::iterations(1.0, sigma, 0, 5)
        };
        let run = run(&mut oracle, &vec![0.0; 10], &cfg).unwrap();
        assert!(run.iterations < 100_000);
        let f0 = oracle.value(&vec![0.0; 10]);
        assert!(gap_at(&oracle, &run.x) <= 1e-6 * (f0 - f_star) * (1.0 + 1e-12));
    }

    #[test]
    fn noise_free_flag_matches_plain_run() {
        // noise: Some(NoiseSpec { 0, 0 }) must not change the iterates.
        let (a, b) = tridiag_instance(8);
        let sigma = spd_parameters(&a).unwrap().sigma;
        let mut o1 = SpdQuadraticOracle::new(a.clone(), b.clone()).unwrap();
        let mut o2 = SpdQuadraticOracle::new(a.clone(), b.clone()).unwrap();
        let cfg1 = AcdmConfig::iterations(1.0, sigma, 400, 9);
        let cfg2 = AcdmConfig {
            noise: Some(NoiseSpec {
                eps1: 0.0,
                eps2: 0.0,
            }),
            ..cfg1.clone()
        };
        let r1 = run(&mut o1, &vec![0.0; 8], &cfg1).unwrap();
        let r2 = run(&mut o2, &vec![0.0; 8], &cfg2).unwrap();
        for i in 0..8 {
            assert!((r1.x[i] - r2.x[i]).abs() < 1e-12);
        }
        assert_eq!(r2.counts.noise_injections, 400);
    }

    #[test]
    fn noisy_run_stays_near_optimum() {
        let (a, b) = tridiag_instance(10);
        let sigma = spd_parameters(&a).unwrap().sigma;
        let mut oracle = SpdQuadraticOracle::new(a.clone(), b.clone()).unwrap();
        let eps = 1e-7;
        let cfg = AcdmConfig {
            noise: Some(NoiseSpec {
                eps1: eps,
                eps2: eps,
            }),
            ..AcdmConfig::iterations(1.0, sigma, 5000, 21)
        };
        let run = run(&mut oracle, &vec![0.0; 10], &cfg).unwrap();
        // The gap floor scales like k S eps^2; stay well above that here.
        assert!(gap_at(&oracle, &run.x) < 1e-6);
        assert!(run.x.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn long_run_renormalizes_and_survives() {
        let (a, b) = tridiag_instance(4);
        let sigma = spd_parameters(&a).unwrap().sigma;
        let mut oracle = SpdQuadraticOracle::new(a.clone(), b.clone()).unwrap();
        let cfg = AcdmConfig::iterations(1.0, sigma, 200_000, 13);
        let run = run(&mut oracle, &vec![0.0; 4], &cfg).unwrap();
        assert!(run.counts.renormalizations > 0);
        assert!(gap_at(&oracle, &run.x).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_x0() {
        let (a, b) = tridiag_instance(4);
        let mut oracle = SpdQuadraticOracle::new(a, b).unwrap();
        let cfg = AcdmConfig::iterations(1.0, 1.0, 10, 0);
        assert!(AcdmEngine::new(&mut oracle, &[0.0; 3], &cfg).is_err());
    }
}
