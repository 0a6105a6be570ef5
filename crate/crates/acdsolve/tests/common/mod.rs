//! Helpers shared by the integration tests.

use acdsolve::acdm::{
    simple_theta, thresholded_lipschitz, AcdmConfig, AcdmEngine, CoefficientState, Mode, OpCounts,
};
use acdsolve::csr::csr_row_dot;
use acdsolve::dense::symmetric_eigenvalues;
use acdsolve::oracle::SpdQuadraticOracle;
use acdsolve::rng::{rng_from_seed, SolverRng};
use acdsolve::{AliasSampler, CsrMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

/// Dense random SPD instance `A = M^T M + delta I` with standard normal
/// `M`, plus a standard normal right-hand side.
pub fn random_spd(n: usize, delta: f64, seed: u64) -> (CsrMatrix, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let m: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let mut a = vec![vec![0.0; n]; n];
    for (i, row_i) in a.iter_mut().enumerate() {
        for (j, aij) in row_i.iter_mut().enumerate() {
            let mut s = 0.0;
            for mk in &m {
                s += mk[i] * mk[j];
            }
            *aij = s / n as f64 + if i == j { delta } else { 0.0 };
        }
    }
    let b: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    (CsrMatrix::from_dense(&a).unwrap(), b)
}

/// Strong convexity of `x -> x^T A x / 2` in the norm weighted by
/// `L_i^(1-exponent)`: the smallest eigenvalue of `D^{-1/2} A D^{-1/2}`.
pub fn sigma_for_exponent(a: &CsrMatrix, exponent: f64) -> f64 {
    let n = a.nrows();
    let d: Vec<f64> = (0..n)
        .map(|i| a.diagonal(i).powf((1.0 - exponent) / 2.0))
        .collect();
    let dense = a.to_dense();
    let scaled: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| dense[i][j] / (d[i] * d[j])).collect())
        .collect();
    let eigs = symmetric_eigenvalues(&CsrMatrix::from_dense(&scaled).unwrap()).unwrap();
    eigs[0]
}

/// Standard normal vector.
pub fn random_vector(n: usize, rng: &mut SolverRng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// `max_i |a_i - b_i| / max(1, |a_i|)`.
pub fn max_rel_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs() / x.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// A literal O(n)-per-step transcription of the accelerated iteration:
/// `x` and `v` as plain vectors, `y = alpha v + (1 - alpha) x` formed from
/// scratch every step. This is the recurrence the implicit engine is
/// supposed to compress, so running both side by side checks the engine.
pub struct NaiveAcdm<'a> {
    a: &'a CsrMatrix,
    b: &'a [f64],
    l_tilde: Vec<f64>,
    s_tilde: f64,
    sigma: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl<'a> NaiveAcdm<'a> {
    pub fn new(a: &'a CsrMatrix, b: &'a [f64], exponent: f64, sigma: f64, x0: &[f64]) -> Self {
        let l: Vec<f64> = (0..a.nrows()).map(|i| a.diagonal(i)).collect();
        let t = thresholded_lipschitz(&l, exponent).unwrap();
        NaiveAcdm {
            a,
            b,
            l_tilde: t.l_tilde,
            s_tilde: t.s_tilde,
            sigma,
            x: x0.to_vec(),
            v: x0.to_vec(),
        }
    }

    pub fn y_from(&self, alpha: f64) -> Vec<f64> {
        self.v
            .iter()
            .zip(&self.x)
            .map(|(&vi, &xi)| alpha * vi + (1.0 - alpha) * xi)
            .collect()
    }

    fn partial(&self, i: usize, y: &[f64]) -> f64 {
        csr_row_dot(self.a, i, y) - self.b[i]
    }

    /// One step of the adaptive-schedule recurrence, coordinate `i`.
    pub fn step_stable(&mut self, i: usize, gamma: f64, beta: f64, alpha: f64) {
        let y = self.y_from(alpha);
        let g = self.partial(i, &y);
        let mut x_new = y.clone();
        x_new[i] -= g / self.l_tilde[i];
        let mut v_new: Vec<f64> = self
            .v
            .iter()
            .zip(&y)
            .map(|(&vi, &yi)| beta * vi + (1.0 - beta) * yi)
            .collect();
        v_new[i] -= gamma / self.l_tilde[i] * g;
        self.x = x_new;
        self.v = v_new;
    }

    /// One step of the fixed-theta recurrence, coordinate `i`.
    pub fn step_simple(&mut self, i: usize, theta: f64) {
        let y: Vec<f64> = self
            .v
            .iter()
            .zip(&self.x)
            .map(|(&vi, &xi)| (theta * vi + xi) / (1.0 + theta))
            .collect();
        let g = self.partial(i, &y);
        let mut x_new = y.clone();
        x_new[i] -= g / self.l_tilde[i];
        let mut v_new: Vec<f64> = self
            .v
            .iter()
            .zip(&y)
            .map(|(&vi, &yi)| (1.0 - theta) * vi + theta * yi)
            .collect();
        v_new[i] -= self.s_tilde * theta / (self.sigma * self.l_tilde[i]) * g;
        self.x = x_new;
        self.v = v_new;
    }
}

/// Outcome of one side-by-side run of the implicit engine and [`NaiveAcdm`].
pub struct NaiveComparison {
    /// Worst relative deviation over `(x, v, y)` at the end of the run.
    pub deviation: f64,
    /// The implicit engine's operation counters.
    pub counts: OpCounts,
    /// The fixed-schedule rate `sqrt(sigma / (2 S~ n))` for the instance;
    /// the basis determinant shrinks by about `1 - 2 theta` per step, which
    /// bounds how often renormalization may fire.
    pub theta: f64,
}

/// Runs both implementations side by side for `steps` iterations on a
/// random instance and reports how far apart they ended up.
pub fn compare_with_naive(
    instance_seed: u64,
    exponent: f64,
    mode: Mode,
    steps: usize,
) -> NaiveComparison {
    let n = 8 + (instance_seed as usize * 7) % 33;
    let (a, b) = random_spd(n, 0.5, instance_seed);
    let sigma = sigma_for_exponent(&a, exponent);
    let mut rng = rng_from_seed(instance_seed.wrapping_mul(31) ^ 0x5eed);
    let x0 = random_vector(n, &mut rng);

    let mut oracle = SpdQuadraticOracle::new(a.clone(), b.clone()).unwrap();
    let cfg = AcdmConfig {
        mode,
        ..AcdmConfig::iterations(exponent, sigma, steps, instance_seed)
    };
    let mut engine = AcdmEngine::new(&mut oracle, &x0, &cfg).unwrap();

    let mut naive = NaiveAcdm::new(&a, &b, exponent, sigma, &x0);
    // The engine's only rng use is the sampler draw, so an identical
    // sampler over an identical rng replays its coordinate choices.
    let l: Vec<f64> = (0..n).map(|i| a.diagonal(i)).collect();
    let weights = thresholded_lipschitz(&l, exponent).unwrap().weights;
    let sampler = AliasSampler::new(&weights).unwrap();
    let mut naive_rng = rng_from_seed(instance_seed);
    let mut schedule = CoefficientState::new(n, sigma, naive.s_tilde).unwrap();
    let theta = simple_theta(n, sigma, naive.s_tilde);

    for k in 0..steps {
        let i_naive = sampler.sample(&mut naive_rng);
        match mode {
            Mode::Stable => {
                let f = schedule.frame();
                naive.step_stable(i_naive, f.gamma, f.beta, f.alpha);
                schedule.advance();
            }
            Mode::Simple => naive.step_simple(i_naive, theta),
        }
        let i_engine = engine.step().unwrap();
        assert_eq!(i_engine, i_naive, "coordinate draw diverged at step {k}");
    }

    let x_eng = engine.current_x();
    let (v_eng, y_eng) = engine.current_pair();
    let counts = engine.counts();
    let y_naive = match mode {
        Mode::Stable => naive.y_from(schedule.frame().alpha),
        Mode::Simple => naive
            .v
            .iter()
            .zip(&naive.x)
            .map(|(&vi, &xi)| (theta * vi + xi) / (1.0 + theta))
            .collect(),
    };
    let deviation = max_rel_deviation(&x_eng, &naive.x)
        .max(max_rel_deviation(&v_eng, &naive.v))
        .max(max_rel_deviation(&y_eng, &y_naive));
    NaiveComparison {
        deviation,
        counts,
        theta,
    }
}
