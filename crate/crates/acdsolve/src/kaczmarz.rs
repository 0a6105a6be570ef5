//! Accelerated randomized Kaczmarz for consistent overdetermined systems.
//!
//! Solving `A x = b` is recast as minimizing the dual objective
//! `f(y) = ||A^T y||^2 / 2 - <b, y>` over row-combination coefficients
//! `y`: its coordinate partials are `f_i(y) = <a_i, A^T y> - b_i`, its
//! coordinate Lipschitz constants are `L_i = ||a_i||^2`, and at the dual
//! optimum `x = A^T y` solves the primal system. Running the accelerated
//! engine over this objective — with the dual registers shadowed by their
//! primal images `A^T u`, `A^T w`, so each step costs one row of work —
//! yields the accelerated Kaczmarz method: sampling
//! `max(||a_i||^2, ||A||_F^2 / m)`-proportionally, it needs
//! `O(kappa sqrt(m))` projections to the plain method's `O(kappa^2)`,
//! where `kappa = ||A^{-1}||_2 ||A||_F`.
//!
//! Strong convexity lives on the row space only (the dual null space is
//! quotiented out automatically by carrying primal state), with modulus
//! `sigma_dual = 1 / ||A^{-1}||_2^2 = sigma_min(A)^2`. At this scale the
//! caller measures it directly; see [`ArkProblem::with_measured_sigma`].

use crate::acdm::{AcdmConfig, AcdmEngine, ConvergenceTrace, Mode, OpCounts, TraceRow};
use crate::baselines::row_norms_sq;
use crate::csr::{csr_row_dot, CsrMatrix};
use crate::dense::singular_value_range;
use crate::error::{Error, Result};
use crate::oracle::DualLeastSquaresOracle;
use crate::rng::rng_from_seed;
use crate::sampler::AliasSampler;

/// A consistent overdetermined system prepared for accelerated Kaczmarz.
#[derive(Debug, Clone)]
pub struct ArkProblem {
    a: CsrMatrix,
    b: Vec<f64>,
    row_norms_sq: Vec<f64>,
    fro_norm_sq: f64,
    sigma_dual: f64,
}

impl ArkProblem {
    /// `sigma_dual` is the squared smallest singular value of `A`; the
    /// solver treats it as given (the guarantee assumes the convexity
    /// parameter is known).
    pub fn new(a: CsrMatrix, b: Vec<f64>, sigma_dual: f64) -> Result<Self> {
        if b.len() != a.nrows() {
            return Err(Error::invalid(format!(
                "right-hand side length {} does not match {} rows",
                b.len(),
                a.nrows()
            )));
        }
        if !(sigma_dual > 0.0) || !sigma_dual.is_finite() {
            return Err(Error::invalid(
                "sigma_dual must be positive and finite (is A full row rank?)",
            ));
        }
        let row_norms_sq = row_norms_sq(&a)?;
        let fro_norm_sq = row_norms_sq.iter().sum();
        Ok(ArkProblem {
            a,
            b,
            row_norms_sq,
            fro_norm_sq,
            sigma_dual,
        })
    }

    /// Builds the problem measuring `sigma_dual` by a dense SVD; meant for
    /// desk-scale experiments and tests.
    pub fn with_measured_sigma(a: CsrMatrix, b: Vec<f64>) -> Result<Self> {
        let (smin, _) = singular_value_range(&a)?;
        ArkProblem::new(a, b, smin * smin)
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn row_norms_sq(&self) -> &[f64] {
        &self.row_norms_sq
    }

    pub fn fro_norm_sq(&self) -> f64 {
        self.fro_norm_sq
    }

    pub fn sigma_dual(&self) -> f64 {
        self.sigma_dual
    }

    /// The relative condition number `||A^{-1}||_2 ||A||_F`.
    pub fn kappa(&self) -> f64 {
        (self.fro_norm_sq / self.sigma_dual).sqrt()
    }

    /// `||A x - b||^2`.
    pub fn residual_sq(&self, x: &[f64]) -> f64 {
        (0..self.a.nrows())
            .map(|i| {
                let r = csr_row_dot(&self.a, i, x) - self.b[i];
                r * r
            })
            .sum()
    }
}

/// Sampling weights of the accelerated method:
/// `max(||a_i||^2, ||A||_F^2 / m)` — the exponent-1 threshold rule applied
/// to `L_i = ||a_i||^2`.
pub fn ark_sampling_weights(p: &ArkProblem) -> Vec<f64> {
    let floor = p.fro_norm_sq / p.a.nrows() as f64;
    p.row_norms_sq.iter().map(|&r| r.max(floor)).collect()
}

#[derive(Debug, Clone)]
pub struct ArkConfig {
    pub iters: usize,
    pub seed: u64,
    /// Record a trace row every this many iterations (0 = first/last only).
    pub record_every: usize,
    /// Known solution; enables squared-distance entries in the trace's
    /// `f_gap` column.
    pub x_star: Option<Vec<f64>>,
    /// Stop with a diagnostic when the best residual has not improved over
    /// a window of `5 n` iterations — the signature of an inconsistent
    /// system, which the method cannot solve. Costs one O(nnz) residual
    /// evaluation every `n` iterations.
    pub detect_plateau: bool,
}

impl ArkConfig {
    pub fn new(iters: usize, seed: u64) -> Self {
        ArkConfig {
            iters,
            seed,
            record_every: 0,
            x_star: None,
            detect_plateau: true,
        }
    }
}

/// Why an accelerated Kaczmarz run returned.
#[derive(Debug, Clone, PartialEq)]
pub enum ArkStop {
    Completed,
    /// Best residual stagnated; the system is likely inconsistent.
    ResidualPlateau { at: usize, best_residual: f64 },
}

#[derive(Debug, Clone)]
pub struct ArkRun {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub stop: ArkStop,
    pub trace: ConvergenceTrace,
    pub counts: OpCounts,
}

/// Runs accelerated Kaczmarz from `x_0 = 0` (the zero dual point, which
/// lies in the row space as the analysis requires).
pub fn ark_run(p: &ArkProblem, cfg: &ArkConfig) -> Result<ArkRun> {
    let m = p.a.nrows();
    let n = p.a.ncols();
    let start = std::time::Instant::now();
    let mut oracle = DualLeastSquaresOracle::new(p.a.clone(), p.b.clone())?;
    let engine_cfg = AcdmConfig {
        mode: Mode::Simple,
        ..AcdmConfig::iterations(1.0, p.sigma_dual, cfg.iters, cfg.seed)
    };
    let y0 = vec![0.0; m];
    let mut engine = AcdmEngine::new(&mut oracle, &y0, &engine_cfg)?;

    let mut trace = ConvergenceTrace::new();
    let dist_sq = |x: &[f64]| {
        cfg.x_star
            .as_ref()
            .map(|xs| x.iter().zip(xs).map(|(&a, &b)| (a - b) * (a - b)).sum())
            .unwrap_or(f64::NAN)
    };
    let primal = |e: &AcdmEngine<DualLeastSquaresOracle>| {
        let (cu, cw) = e.x_combo();
        e.oracle().primal_combination(cu, cw)
    };
    trace.push(TraceRow {
        k: 0,
        f_gap: dist_sq(&vec![0.0; n]),
        grad_sq: p.residual_sq(&vec![0.0; n]),
        coord: -1,
        wall_ns: start.elapsed().as_nanos(),
    });

    let check_every = n.max(1);
    // Under momentum the residual oscillates with period ~1/theta, so the
    // best-so-far envelope of an ill-conditioned system can sit flat for far
    // longer than any dimension-based window while still converging.
    let s_tilde: f64 = ark_sampling_weights(p).iter().sum();
    let theta = crate::acdm::simple_theta(m, p.sigma_dual, s_tilde);
    let window = (5 * n).max((4.0 / theta).ceil() as usize);
    // A stagnant residual this far below the data scale means the system
    // is solved, not inconsistent.
    let plateau_floor = 1e-12 * p.b.iter().map(|&v| v * v).sum::<f64>().sqrt().max(1.0);
    let mut best_residual = f64::INFINITY;
    let mut last_improvement = 0usize;
    let mut stop = ArkStop::Completed;

    let mut k = 0usize;
    while k < cfg.iters {
        let coord = engine.step()?;
        k += 1;

        let mut grad_sq = f64::NAN;
        if cfg.detect_plateau && k % check_every == 0 {
            let x = primal(&engine);
            let r = p.residual_sq(&x).sqrt();
            grad_sq = r * r;
            if r < best_residual * (1.0 - 1e-9) {
                best_residual = r;
                last_improvement = k;
            } else if k - last_improvement >= window && best_residual > plateau_floor {
                stop = ArkStop::ResidualPlateau {
                    at: k,
                    best_residual,
                };
                trace.push(TraceRow {
                    k: k as u64,
                    f_gap: dist_sq(&x),
                    grad_sq,
                    coord: coord as i64,
                    wall_ns: start.elapsed().as_nanos(),
                });
                break;
            }
        }

        if cfg.record_every > 0 && k % cfg.record_every == 0 {
            let x = primal(&engine);
            trace.push(TraceRow {
                k: k as u64,
                f_gap: dist_sq(&x),
                grad_sq,
                coord: coord as i64,
                wall_ns: start.elapsed().as_nanos(),
            });
        }
    }

    let x = primal(&engine);
    if trace.rows().last().map(|r| r.k) != Some(k as u64) {
        trace.push(TraceRow {
            k: k as u64,
            f_gap: dist_sq(&x),
            grad_sq: p.residual_sq(&x),
            coord: -1,
            wall_ns: start.elapsed().as_nanos(),
        });
    }
    Ok(ArkRun {
        x,
        iterations: k,
        stop,
        trace,
        counts: engine.counts(),
    })
}

/// Plain (unaccelerated) coordinate descent on the dual objective, carrying
/// primal state only. Step for row `i`:
///
/// ```text
/// g = <a_i, x> - b_i;    x <- x - (g / ||a_i||^2) a_i
/// ```
///
/// which is literally the Strohmer–Vershynin randomized Kaczmarz
/// projection — the two produce bit-identical iterates from the same seed.
pub fn dual_cdm_run(p: &ArkProblem, iters: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = AliasSampler::new(&p.row_norms_sq)?;
    let mut rng = rng_from_seed(seed);
    let mut x = vec![0.0; p.a.ncols()];
    for _ in 0..iters {
        let i = sampler.sample(&mut rng);
        let (cols, vals) = p.a.row(i);
        let g = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum::<f64>() - p.b[i];
        let step = -(g / p.row_norms_sq[i]);
        for (&j, &v) in cols.iter().zip(vals) {
            x[j] += step * v;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::rk_project;
    use crate::rng::SolverRng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian_system(m: usize, n: usize, seed: u64) -> (CsrMatrix, Vec<f64>, Vec<f64>) {
        let mut rng = rng_from_seed(seed);
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let a = CsrMatrix::from_dense(&rows).unwrap();
        let x_star: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let b = a.mul_vec(&x_star);
        (a, b, x_star)
    }

    #[test]
    fn sampling_weights_hand_example() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 2.0)]).unwrap();
        let p = ArkProblem::new(a, vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(ark_sampling_weights(&p), vec![2.5, 4.0]);
    }

    #[test]
    fn sampling_weights_equal_norm_rows_uniform() {
        let (a, b, _) = gaussian_system(4, 4, 1);
        // Rescale every row to unit norm.
        let dense = a.to_dense();
        let scaled: Vec<Vec<f64>> = dense
            .iter()
            .map(|row| {
                let nrm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                row.iter().map(|v| v / nrm).collect()
            })
            .collect();
        let p =
            ArkProblem::new(CsrMatrix::from_dense(&scaled).unwrap(), b, 1e-3).unwrap();
        let w = ark_sampling_weights(&p);
        for &wi in &w {
            assert!((wi - w[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_weights_single_row() {
        let a = CsrMatrix::from_triplets(1, 3, &[(0, 0, 3.0), (0, 2, 4.0)]).unwrap();
        let p = ArkProblem::new(a, vec![1.0], 1.0).unwrap();
        assert_eq!(ark_sampling_weights(&p), vec![25.0]);
    }

    #[test]
    fn kappa_of_diagonal_matrix() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 3.0), (1, 1, 4.0)]).unwrap();
        let p = ArkProblem::with_measured_sigma(a, vec![0.0, 0.0]).unwrap();
        // ||A^{-1}||_2 = 1/3, ||A||_F = 5.
        assert!((p.kappa() - 5.0 / 3.0).abs() < 1e-12);
        assert!((p.sigma_dual() - 9.0).abs() < 1e-9);
    }

    #[test]
    fn identity_system_converges_fast() {
        let a = CsrMatrix::identity(2);
        let p = ArkProblem::new(a, vec![1.0, 1.0], 1.0).unwrap();
        let run = ark_run(&p, &ArkConfig::new(60, 3)).unwrap();
        for &xi in &run.x {
            assert!((xi - 1.0).abs() < 1e-12);
        }
        assert_eq!(run.stop, ArkStop::Completed);
    }

    #[test]
    fn gaussian_consistent_system_converges() {
        let (a, b, x_star) = gaussian_system(40, 10, 7);
        let p = ArkProblem::with_measured_sigma(a, b).unwrap();
        let mut cfg = ArkConfig::new(4000, 11);
        cfg.x_star = Some(x_star.clone());
        let run = ark_run(&p, &cfg).unwrap();
        let d: f64 = run
            .x
            .iter()
            .zip(&x_star)
            .map(|(&u, &v)| (u - v) * (u - v))
            .sum();
        assert!(d < 1e-16, "squared distance {d:e}");
        assert_eq!(run.stop, ArkStop::Completed);
        assert_eq!(run.counts.partials as usize, run.iterations);
    }

    #[test]
    fn inconsistent_system_reports_plateau() {
        let (a, _, _) = gaussian_system(12, 3, 5);
        // Right-hand side far from the column span.
        let mut rng: SolverRng = rng_from_seed(99);
        let b: Vec<f64> = (0..12).map(|_| rng.sample::<f64, _>(StandardNormal) * 10.0).collect();
        let p = ArkProblem::with_measured_sigma(a, b).unwrap();
        let run = ark_run(&p, &ArkConfig::new(1_000_000, 1)).unwrap();
        match run.stop {
            ArkStop::ResidualPlateau { at, best_residual } => {
                assert!(at < 1_000_000);
                assert!(best_residual.is_finite());
            }
            ArkStop::Completed => panic!("plateau not detected on inconsistent system"),
        }
    }

    #[test]
    fn dual_cdm_is_exactly_randomized_kaczmarz() {
        let (a, b, _) = gaussian_system(30, 8, 13);
        let p = ArkProblem::new(a.clone(), b.clone(), 1.0).unwrap();
        for seed in [0u64, 1, 2, 17] {
            let via_dual = dual_cdm_run(&p, 2000, seed).unwrap();
            // Replay the identical draws through the projection form.
            let sampler = AliasSampler::new(&p.row_norms_sq).unwrap();
            let mut rng = rng_from_seed(seed);
            let mut x = vec![0.0; 8];
            for _ in 0..2000 {
                let i = sampler.sample(&mut rng);
                rk_project(&a, &b, &mut x, i);
            }
            assert_eq!(via_dual, x, "seed {seed}");
        }
    }

    #[test]
    fn shadow_dense_dual_run_matches_primal_registers() {
        // A literal dense ACDM recurrence in dual y-space; its primal image
        // A^T x_dual must track the engine's primal combination.
        let (a, b, _) = gaussian_system(15, 4, 23);
        let p = ArkProblem::with_measured_sigma(a.clone(), b.clone()).unwrap();
        let m = 15;
        let weights = ark_sampling_weights(&p);
        let s_tilde: f64 = weights.iter().sum();
        let theta = crate::acdm::simple_theta(m, p.sigma_dual, s_tilde);

        let mut oracle = DualLeastSquaresOracle::new(a.clone(), b.clone()).unwrap();
        let cfg = AcdmConfig {
            mode: Mode::Simple,
            ..AcdmConfig::iterations(1.0, p.sigma_dual, 0, 31)
        };
        let mut engine = AcdmEngine::new(&mut oracle, &vec![0.0; m], &cfg).unwrap();

        let sampler = AliasSampler::new(&weights).unwrap();
        let mut rng = rng_from_seed(31);
        let mut xd = vec![0.0; m];
        let mut vd = vec![0.0; m];
        let at = {
            // Dense transpose for the shadow side.
            let d = a.to_dense();
            (0..4_usize)
                .map(|j| (0..m).map(|i| d[i][j]).collect::<Vec<f64>>())
                .collect::<Vec<_>>()
        };
        let primal_of = |y: &[f64]| -> Vec<f64> {
            at.iter()
                .map(|col| col.iter().zip(y).map(|(&c, &yi)| c * yi).sum())
                .collect()
        };

        for k in 0..600 {
            let i = sampler.sample(&mut rng);
            let y_mix: Vec<f64> = vd
                .iter()
                .zip(&xd)
                .map(|(&v, &x)| (theta * v + x) / (1.0 + theta))
                .collect();
            let g = csr_row_dot(&a, i, &primal_of(&y_mix)) - b[i];
            let li = weights[i];
            let mut x_new = y_mix.clone();
            x_new[i] -= g / li;
            let mut v_new: Vec<f64> = vd
                .iter()
                .zip(&y_mix)
                .map(|(&v, &y)| (1.0 - theta) * v + theta * y)
                .collect();
            v_new[i] -= s_tilde * theta / (p.sigma_dual * li) * g;
            xd = x_new;
            vd = v_new;

            let ie = engine.step().unwrap();
            assert_eq!(ie, i, "draw diverged at {k}");
        }

        let shadow_primal = primal_of(&xd);
        let (cu, cw) = engine.x_combo();
        let engine_primal = engine.oracle().primal_combination(cu, cw);
        for (got, want) in engine_primal.iter().zip(&shadow_primal) {
            assert!(
                (got - want).abs() <= 1e-8 * want.abs().max(1.0),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn rejects_rank_deficient_sigma() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(ArkProblem::new(a, vec![1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn residual_stays_bounded_at_high_condition() {
        // kappa around 1e3 via a geometric diagonal; no divergence.
        let n = 12;
        let t: Vec<(usize, usize, f64)> = (0..n)
            .map(|i| (i, i, 1e3f64.powf(i as f64 / (n - 1) as f64 - 1.0)))
            .collect();
        let a = CsrMatrix::from_triplets(n, n, &t).unwrap();
        let x_star = vec![1.0; n];
        let b = a.mul_vec(&x_star);
        let p = ArkProblem::with_measured_sigma(a, b).unwrap();
        let run = ark_run(&p, &ArkConfig::new(20_000, 2)).unwrap();
        assert!(run.x.iter().all(|v| v.is_finite()));
        assert!(p.residual_sq(&run.x) <= p.residual_sq(&vec![0.0; n]));
    }
}
