//! Reference first-order methods: gradient descent, accelerated gradient
//! descent, plain (unaccelerated) coordinate descent, conjugate gradient,
//! and standard randomized Kaczmarz.
//!
//! All of them act on the quadratic `f(x) = x^T A x / 2 - b^T x` given as a
//! CSR matrix; they exist to benchmark the accelerated engine against, not
//! to be fast. The `*_step` free functions mirror the textbook one-liners
//! (and rebuild sampling tables per call where sampling is involved); the
//! `*_run` drivers cache what can be cached and record traces.


use crate::acdm::{ConvergenceTrace, TraceRow};
use crate::csr::{csr_row_dot, CsrMatrix};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SolverRng};
use crate::sampler::AliasSampler;

/// Outcome of a baseline driver.
#[derive(Debug, Clone)]
pub struct BaselineRun {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub trace: ConvergenceTrace,
}

pub fn quadratic_value(a: &CsrMatrix, b: &[f64], x: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    0.5 * x.iter().zip(&ax).map(|(&xi, &axi)| xi * axi).sum::<f64>()
        - b.iter().zip(x).map(|(&bi, &xi)| bi * xi).sum::<f64>()
}

pub fn quadratic_gradient(a: &CsrMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut g = a.mul_vec(x);
    for (gi, &bi) in g.iter_mut().zip(b) {
        *gi -= bi;
    }
    g
}

/// `x - (1/L) (A x - b)`.
pub fn gd_step(a: &CsrMatrix, b: &[f64], x: &[f64], l: f64) -> Vec<f64> {
    let g = quadratic_gradient(a, b, x);
    x.iter().zip(&g).map(|(&xi, &gi)| xi - gi / l).collect()
}

pub fn gd_run(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    l: f64,
    iters: usize,
    f_star: Option<f64>,
    record_every: usize,
) -> Result<BaselineRun> {
    if l <= 0.0 || !l.is_finite() {
        return Err(Error::invalid("gradient descent needs L > 0"));
    }
    let mut x = x0.to_vec();
    let mut trace = ConvergenceTrace::new();
    let start = std::time::Instant::now();
    record(&mut trace, 0, a, b, &x, f_star, &start);
    for k in 1..=iters {
        x = gd_step(a, b, &x, l);
        if should_record(k, iters, record_every) {
            record(&mut trace, k, a, b, &x, f_star, &start);
        }
    }
    Ok(BaselineRun {
        x,
        iterations: iters,
        trace,
    })
}

/// Constant-momentum accelerated gradient descent for `sigma`-strongly
/// convex, `L`-smooth objectives:
///
/// ```text
/// x_{k+1} = y_k - (1/L) grad f(y_k)
/// y_{k+1} = x_{k+1} + m (x_{k+1} - x_k),   m = (1 - sqrt(sigma/L)) / (1 + sqrt(sigma/L)).
/// ```
pub fn agd_run(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    l: f64,
    sigma: f64,
    iters: usize,
    f_star: Option<f64>,
    record_every: usize,
) -> Result<BaselineRun> {
    if !(0.0 < sigma && sigma <= l) {
        return Err(Error::invalid(format!(
            "accelerated gradient descent needs 0 < sigma <= L, got sigma {sigma}, L {l}"
        )));
    }
    let q = (sigma / l).sqrt();
    let m = (1.0 - q) / (1.0 + q);
    let mut x = x0.to_vec();
    let mut y = x0.to_vec();
    let mut trace = ConvergenceTrace::new();
    let start = std::time::Instant::now();
    record(&mut trace, 0, a, b, &x, f_star, &start);
    for k in 1..=iters {
        let g = quadratic_gradient(a, b, &y);
        let x_new: Vec<f64> = y.iter().zip(&g).map(|(&yi, &gi)| yi - gi / l).collect();
        y = x_new
            .iter()
            .zip(&x)
            .map(|(&xn, &xo)| xn + m * (xn - xo))
            .collect();
        x = x_new;
        if should_record(k, iters, record_every) {
            record(&mut trace, k, a, b, &x, f_star, &start);
        }
    }
    Ok(BaselineRun {
        x,
        iterations: iters,
        trace,
    })
}

/// One plain coordinate descent step: samples `i` with probability
/// `L_i^exponent / S_exponent` (no thresholding) and moves `x_i` by
/// `-f_i(x)/L_i`. Builds the sampling table per call; use [`cdm_run`] for
/// anything longer than a few steps.
pub fn cdm_step(
    a: &CsrMatrix,
    b: &[f64],
    x: &[f64],
    rng: &mut SolverRng,
    exponent: f64,
) -> Result<Vec<f64>> {
    let l: Vec<f64> = (0..a.nrows()).map(|i| a.diagonal(i)).collect();
    let weights: Vec<f64> = l.iter().map(|&li| li.powf(exponent)).collect();
    let sampler = AliasSampler::new(&weights)?;
    let i = sampler.sample(rng);
    let mut out = x.to_vec();
    out[i] -= (csr_row_dot(a, i, x) - b[i]) / l[i];
    Ok(out)
}

pub fn cdm_run(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    exponent: f64,
    iters: usize,
    seed: u64,
    f_star: Option<f64>,
    record_every: usize,
) -> Result<BaselineRun> {
    let n = a.nrows();
    let l: Vec<f64> = (0..n).map(|i| a.diagonal(i)).collect();
    if l.iter().any(|&li| li <= 0.0) {
        return Err(Error::invalid("coordinate descent needs L_i > 0"));
    }
    let weights: Vec<f64> = l.iter().map(|&li| li.powf(exponent)).collect();
    let sampler = AliasSampler::new(&weights)?;
    let mut rng = rng_from_seed(seed);
    let mut x = x0.to_vec();
    let mut trace = ConvergenceTrace::new();
    let start = std::time::Instant::now();
    record(&mut trace, 0, a, b, &x, f_star, &start);
    for k in 1..=iters {
        let i = sampler.sample(&mut rng);
        x[i] -= (csr_row_dot(a, i, &x) - b[i]) / l[i];
        if should_record(k, iters, record_every) {
            record(&mut trace, k, a, b, &x, f_star, &start);
        }
    }
    Ok(BaselineRun {
        x,
        iterations: iters,
        trace,
    })
}

/// Conjugate gradient outcome. `residual_norms[k]` is `||A x_k - b||`;
/// `successive_residual_cos_max` is the largest observed
/// `|<r_k, r_{k+1}>| / (||r_k|| ||r_{k+1}||)`, which exact arithmetic would
/// keep at zero.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual_norms: Vec<f64>,
    pub successive_residual_cos_max: f64,
    pub trace: ConvergenceTrace,
}

/// Textbook conjugate gradient on SPD `A`, stopping at
/// `||A x - b|| <= tol` or after `max_iters` steps.
pub fn cg_solve(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<CgOutcome> {
    if a.nrows() != a.ncols() {
        return Err(Error::invalid("conjugate gradient needs a square matrix"));
    }
    let start = std::time::Instant::now();
    let mut x = x0.to_vec();
    let mut r: Vec<f64> = {
        let ax = a.mul_vec(&x);
        b.iter().zip(&ax).map(|(&bi, &axi)| bi - axi).collect()
    };
    let mut p = r.clone();
    let mut rs: f64 = r.iter().map(|&v| v * v).sum();
    let mut residual_norms = vec![rs.sqrt()];
    let mut cos_max: f64 = 0.0;
    let mut trace = ConvergenceTrace::new();
    trace.push(TraceRow {
        k: 0,
        f_gap: f64::NAN,
        grad_sq: rs,
        coord: -1,
        wall_ns: start.elapsed().as_nanos(),
    });
    let mut k = 0;
    while rs.sqrt() > tol && k < max_iters {
        let ap = a.mul_vec(&p);
        let curvature: f64 = p.iter().zip(&ap).map(|(&pi, &api)| pi * api).sum();
        if curvature <= 0.0 || !curvature.is_finite() {
            return Err(Error::numerical(format!(
                "conjugate gradient breakdown: direction curvature {curvature} at iteration {k}"
            )));
        }
        let alpha = rs / curvature;
        for i in 0..x.len() {
            x[i] += alpha * p[i];
        }
        let r_old_norm = rs.sqrt();
        let mut dot_old_new = 0.0;
        for i in 0..r.len() {
            let ri_new = r[i] - alpha * ap[i];
            dot_old_new += r[i] * ri_new;
            r[i] = ri_new;
        }
        let rs_new: f64 = r.iter().map(|&v| v * v).sum();
        if r_old_norm > 0.0 && rs_new > 0.0 {
            cos_max = cos_max.max(dot_old_new.abs() / (r_old_norm * rs_new.sqrt()));
        }
        let beta = rs_new / rs;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_new;
        k += 1;
        residual_norms.push(rs.sqrt());
        trace.push(TraceRow {
            k: k as u64,
            f_gap: f64::NAN,
            grad_sq: rs,
            coord: -1,
            wall_ns: start.elapsed().as_nanos(),
        });
    }
    Ok(CgOutcome {
        x,
        iterations: k,
        residual_norms,
        successive_residual_cos_max: cos_max,
        trace,
    })
}

/// Projects `x` onto the hyperplane `<a_i, x> = b_i`; returns the residual
/// `b_i - <a_i, x>` before projection.
pub fn rk_project(a: &CsrMatrix, b: &[f64], x: &mut [f64], i: usize) -> f64 {
    let (cols, vals) = a.row(i);
    let norm_sq: f64 = vals.iter().map(|&v| v * v).sum();
    let resid = b[i] - cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum::<f64>();
    let scale = resid / norm_sq;
    for (&j, &v) in cols.iter().zip(vals) {
        x[j] += scale * v;
    }
    resid
}

/// One randomized Kaczmarz step: samples row `i` with probability
/// `||a_i||^2 / ||A||_F^2` and projects. Builds the sampling table per
/// call; use [`rk_run`] for long runs.
pub fn rk_step(a: &CsrMatrix, b: &[f64], x: &[f64], rng: &mut SolverRng) -> Result<Vec<f64>> {
    let sampler = AliasSampler::new(&row_norms_sq(a)?)?;
    let i = sampler.sample(rng);
    let mut out = x.to_vec();
    rk_project(a, b, &mut out, i);
    Ok(out)
}

/// Squared row norms, rejecting zero rows (a zero row has no hyperplane to
/// project onto).
pub fn row_norms_sq(a: &CsrMatrix) -> Result<Vec<f64>> {
    (0..a.nrows())
        .map(|i| {
            let (_, vals) = a.row(i);
            let s: f64 = vals.iter().map(|&v| v * v).sum();
            if s == 0.0 {
                Err(Error::invalid(format!("row {i} of the system is zero")))
            } else {
                Ok(s)
            }
        })
        .collect()
}

/// Randomized Kaczmarz driver. When `x_star` is supplied the trace's
/// `f_gap` column records the squared distance `||x_k - x_star||^2`.
pub fn rk_run(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    iters: usize,
    seed: u64,
    x_star: Option<&[f64]>,
    record_every: usize,
) -> Result<BaselineRun> {
    let sampler = AliasSampler::new(&row_norms_sq(a)?)?;
    let mut rng = rng_from_seed(seed);
    let mut x = x0.to_vec();
    let mut trace = ConvergenceTrace::new();
    let start = std::time::Instant::now();
    let dist = |x: &[f64]| {
        x_star
            .map(|xs| x.iter().zip(xs).map(|(&a, &b)| (a - b) * (a - b)).sum())
            .unwrap_or(f64::NAN)
    };
    trace.push(TraceRow {
        k: 0,
        f_gap: dist(&x),
        grad_sq: f64::NAN,
        coord: -1,
        wall_ns: start.elapsed().as_nanos(),
    });
    for k in 1..=iters {
        let i = sampler.sample(&mut rng);
        rk_project(a, b, &mut x, i);
        if should_record(k, iters, record_every) {
            trace.push(TraceRow {
                k: k as u64,
                f_gap: dist(&x),
                grad_sq: f64::NAN,
                coord: i as i64,
                wall_ns: start.elapsed().as_nanos(),
            });
        }
    }
    Ok(BaselineRun {
        x,
        iterations: iters,
        trace,
    })
}

fn should_record(k: usize, total: usize, record_every: usize) -> bool {
    k == total || (record_every > 0 && k % record_every == 0)
}

fn record(
    trace: &mut ConvergenceTrace,
    k: usize,
    a: &CsrMatrix,
    b: &[f64],
    x: &[f64],
    f_star: Option<f64>,
    start: &std::time::Instant,
) {
    trace.push(TraceRow {
        k: k as u64,
        f_gap: f_star.map(|fs| quadratic_value(a, b, x) - fs).unwrap_or(f64::NAN),
        grad_sq: f64::NAN,
        coord: -1,
        wall_ns: start.elapsed().as_nanos(),
    });
}
