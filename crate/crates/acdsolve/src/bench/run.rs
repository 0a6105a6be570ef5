//! Experiment execution: per-(method, seed) runs, trace files, summary.
//!
//! Every (method, seed) pair is an independent job; jobs are distributed
//! over a fixed-size thread pool and each writes its own trace CSV
//! atomically, so results are byte-identical across thread counts and
//! reruns except for the wall-clock columns. The summary ranks methods by
//! the `f_gap` trace column against the spec tolerance; methods that do
//! not track a value gap (conjugate gradient reports only the squared
//! residual) fall back to the `grad_sq` column for both the
//! iterations-to-tolerance and final-gap statistics.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::acdm::{self, AcdmConfig, TraceRow};
use crate::baselines::{agd_run, cdm_run, cg_solve, gd_run, quadratic_value, rk_run};
use crate::bench::generate::{realize, Problem};
use crate::bench::spec::{ExperimentSpec, MethodSpec};
use crate::csr::CsrMatrix;
use crate::dense::spd_solve;
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::kaczmarz::{ark_run, ArkConfig, ArkProblem};
use crate::oracle::{spd_parameters, weighted_sigma, SpdQuadraticOracle};
use crate::sdd::{solve_laplacian, LaplacianConfig};

/// One row of `summary.csv`.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub label: String,
    /// Number of seeds run.
    pub seeds: usize,
    /// Seeds whose trace reached the tolerance.
    pub hits: usize,
    /// Mean first iteration at or below tolerance, over the hitting seeds
    /// (`None` when no seed hit).
    pub mean_iters_to_tol: Option<f64>,
    pub mean_final_gap: f64,
    pub mean_wall_ms: f64,
}

#[derive(Debug, Clone, Copy)]
struct RunStats {
    iters_to_tol: Option<u64>,
    final_gap: f64,
    wall_ns: u128,
}

/// Problem-level data shared by all jobs: reference solutions and strong
/// convexity constants are computed once, not per seed.
struct Prepared {
    problem: Problem,
    /// Minimizer (quadratic) or system solution (least squares).
    x_star: Vec<f64>,
    f_star: f64,
    lmax: f64,
    sigma_plain: f64,
    /// `(exponent, sigma)` for each sampling exponent the spec uses.
    sigmas: Vec<(f64, f64)>,
    ark: Option<ArkProblem>,
}

impl Prepared {
    fn sigma_for(&self, exponent: f64) -> f64 {
        self.sigmas
            .iter()
            .find(|&&(e, _)| e == exponent)
            .map(|&(_, s)| s)
            .expect("sigma precomputed for every spec exponent")
    }
}

fn problem_kind(p: &Problem) -> &'static str {
    match p {
        Problem::Quadratic { .. } => "quadratic",
        Problem::LeastSquares { .. } => "least-squares",
        Problem::Flow { .. } => "flow",
    }
}

fn check_compatible(problem: &Problem, method: &MethodSpec) -> Result<()> {
    let ok = match problem {
        Problem::Quadratic { .. } => !matches!(method, MethodSpec::Laplacian { .. }),
        Problem::LeastSquares { .. } => matches!(method, MethodSpec::Rk | MethodSpec::Ark),
        Problem::Flow { .. } => matches!(method, MethodSpec::Laplacian { .. }),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "method `{}` cannot run on a {} problem",
            method.label(),
            problem_kind(problem)
        )))
    }
}

fn prepare(spec: &ExperimentSpec, problem: Problem) -> Result<Prepared> {
    let has = |f: fn(&MethodSpec) -> bool| spec.methods.iter().any(f);
    let mut x_star = Vec::new();
    let mut f_star = f64::NAN;
    let mut lmax = f64::NAN;
    let mut sigma_plain = f64::NAN;
    let mut sigmas = Vec::new();
    let mut ark = None;
    match &problem {
        Problem::Quadratic { a, b } => {
            x_star = spd_solve(a, b)?;
            f_star = quadratic_value(a, b, &x_star);
            if has(|m| matches!(m, MethodSpec::Gd | MethodSpec::Agd)) {
                let p = spd_parameters(a)?;
                lmax = p.lmax;
                sigma_plain = p.sigma;
            }
            for m in &spec.methods {
                if let MethodSpec::Acdm { exponent, .. } = m {
                    if !sigmas.iter().any(|&(e, _)| e == *exponent) {
                        sigmas.push((*exponent, weighted_sigma(a, *exponent)?));
                    }
                }
            }
            if has(|m| matches!(m, MethodSpec::Ark)) {
                ark = Some(ArkProblem::with_measured_sigma(a.clone(), b.clone())?);
            }
        }
        Problem::LeastSquares { a, b } => {
            // The generators emit consistent full-column-rank systems, so
            // the normal equations give the point RK iterates converge to.
            let ad = a.to_dense();
            let (rows, cols) = (a.nrows(), a.ncols());
            let mut gram = vec![vec![0.0; cols]; cols];
            let mut atb = vec![0.0; cols];
            for i in 0..rows {
                for j in 0..cols {
                    atb[j] += ad[i][j] * b[i];
                    for k in 0..cols {
                        gram[j][k] += ad[i][j] * ad[i][k];
                    }
                }
            }
            x_star = spd_solve(&CsrMatrix::from_dense(&gram)?, &atb)?;
            if has(|m| matches!(m, MethodSpec::Ark)) {
                ark = Some(ArkProblem::with_measured_sigma(a.clone(), b.clone())?);
            }
        }
        Problem::Flow { .. } => {}
    }
    Ok(Prepared {
        problem,
        x_star,
        f_star,
        lmax,
        sigma_plain,
        sigmas,
        ark,
    })
}

fn trace_path(out: &Path, label: &str, seed: u64) -> PathBuf {
    out.join(format!("{label}_seed{seed}.csv"))
}

fn run_one(
    prep: &Prepared,
    method: &MethodSpec,
    seed: u64,
    spec: &ExperimentSpec,
    out: &Path,
) -> Result<RunStats> {
    let trace = match (method, &prep.problem) {
        (MethodSpec::Acdm { exponent, mode }, Problem::Quadratic { a, b }) => {
            let mut oracle = SpdQuadraticOracle::new(a.clone(), b.clone())?;
            let cfg = AcdmConfig {
                mode: *mode,
                record_every: spec.record_every,
                f_star: Some(prep.f_star),
                ..AcdmConfig::iterations(*exponent, prep.sigma_for(*exponent), spec.iters, seed)
            };
            acdm::run(&mut oracle, &vec![0.0; a.nrows()], &cfg)?.trace
        }
        (MethodSpec::Cdm { exponent }, Problem::Quadratic { a, b }) => {
            cdm_run(
                a,
                b,
                &vec![0.0; a.nrows()],
                *exponent,
                spec.iters,
                seed,
                Some(prep.f_star),
                spec.record_every,
            )?
            .trace
        }
        (MethodSpec::Gd, Problem::Quadratic { a, b }) => gd_run(
            a,
            b,
            &vec![0.0; a.nrows()],
            prep.lmax,
            spec.iters,
            Some(prep.f_star),
            spec.record_every,
        )?
        .trace,
        (MethodSpec::Agd, Problem::Quadratic { a, b }) => agd_run(
            a,
            b,
            &vec![0.0; a.nrows()],
            prep.lmax,
            prep.sigma_plain,
            spec.iters,
            Some(prep.f_star),
            spec.record_every,
        )?
        .trace,
        (MethodSpec::Cg, Problem::Quadratic { a, b }) => {
            // Drive CG essentially to machine precision; the summary reads
            // its residual column against the spec tolerance.
            let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            cg_solve(a, b, &vec![0.0; a.nrows()], 1e-14 * bnorm.max(1.0), spec.iters)?.trace
        }
        (MethodSpec::Rk, Problem::Quadratic { a, b } | Problem::LeastSquares { a, b }) => rk_run(
            a,
            b,
            &vec![0.0; a.ncols()],
            spec.iters,
            seed,
            Some(&prep.x_star),
            spec.record_every,
        )?
        .trace,
        (MethodSpec::Ark, Problem::Quadratic { .. } | Problem::LeastSquares { .. }) => {
            let p = prep.ark.as_ref().expect("ark problem prepared");
            let cfg = ArkConfig {
                record_every: spec.record_every,
                x_star: Some(prep.x_star.clone()),
                ..ArkConfig::new(spec.iters, seed)
            };
            ark_run(p, &cfg)?.trace
        }
        (MethodSpec::Laplacian { epsilon }, Problem::Flow { g, chi }) => {
            let cfg = LaplacianConfig {
                max_iterations: spec.iters,
                ..LaplacianConfig::new(*epsilon, seed)
            };
            let sol = solve_laplacian(g, chi, &cfg)?;
            let mut trace = sol.trace;
            // Tree graphs solve exactly without any certificate check;
            // give the summary one row to read.
            if trace.is_empty() {
                trace.push(TraceRow {
                    k: 0,
                    f_gap: sol.duality_gap,
                    grad_sq: sol.energy,
                    coord: -1,
                    wall_ns: 0,
                });
            }
            trace
        }
        _ => {
            return Err(Error::invalid(format!(
                "method `{}` cannot run on a {} problem",
                method.label(),
                problem_kind(&prep.problem)
            )))
        }
    };
    trace.write_csv(trace_path(out, &method.label(), seed))?;
    Ok(stats_from_rows(trace.rows().iter().map(|r| (r.k, r.f_gap, r.grad_sq, r.wall_ns)), spec.tolerance))
}

fn stats_from_rows(
    rows: impl Iterator<Item = (u64, f64, f64, u128)>,
    tol: f64,
) -> RunStats {
    let mut iters_to_tol = None;
    let mut final_gap = f64::NAN;
    let mut wall_ns = 0u128;
    for (k, f_gap, grad_sq, wall) in rows {
        let v = if f_gap.is_nan() { grad_sq } else { f_gap };
        if iters_to_tol.is_none() && v <= tol {
            iters_to_tol = Some(k);
        }
        final_gap = v;
        wall_ns = wall;
    }
    RunStats {
        iters_to_tol,
        final_gap,
        wall_ns,
    }
}

fn aggregate(label: String, stats: &[RunStats]) -> MethodSummary {
    let seeds = stats.len();
    let hits = stats.iter().filter(|s| s.iters_to_tol.is_some()).count();
    let mean_iters_to_tol = if hits > 0 {
        Some(
            stats
                .iter()
                .filter_map(|s| s.iters_to_tol)
                .map(|k| k as f64)
                .sum::<f64>()
                / hits as f64,
        )
    } else {
        None
    };
    let mean_final_gap = stats.iter().map(|s| s.final_gap).sum::<f64>() / seeds as f64;
    let mean_wall_ms = stats.iter().map(|s| s.wall_ns as f64 / 1e6).sum::<f64>() / seeds as f64;
    MethodSummary {
        label,
        seeds,
        hits,
        mean_iters_to_tol,
        mean_final_gap,
        mean_wall_ms,
    }
}

fn summary_csv(rows: &[MethodSummary]) -> String {
    let mut out = String::from("method,seeds,hits,mean_iters_to_tol,mean_final_gap,mean_wall_ms\n");
    for r in rows {
        let iters = r
            .mean_iters_to_tol
            .map_or(String::new(), |v| format!("{v:.16e}"));
        out.push_str(&format!(
            "{},{},{},{},{:.16e},{:.16e}\n",
            r.label, r.seeds, r.hits, iters, r.mean_final_gap, r.mean_wall_ms
        ));
    }
    out
}

fn write_summary(out: &Path, rows: &[MethodSummary]) -> Result<()> {
    write_atomic(&out.join("summary.csv"), summary_csv(rows).as_bytes())
}

/// Runs the experiment: one trace CSV per (method, seed) in `out`, plus
/// `summary.csv` and a `problem.meta` sidecar. `seed_override` replaces the
/// spec's seed range (the CLI `--seeds` flag). Nothing is written until the
/// spec validates against the realized problem.
pub fn run_experiment(
    spec: &ExperimentSpec,
    out: &Path,
    threads: usize,
    seed_override: Option<(u64, u64)>,
) -> Result<Vec<MethodSummary>> {
    if spec.methods.is_empty() {
        return Err(Error::invalid("experiment has no methods"));
    }
    let (seed_lo, seed_hi) = seed_override.unwrap_or(spec.seeds);
    if seed_lo >= seed_hi {
        return Err(Error::invalid("seed range is empty"));
    }
    let (problem, meta) = realize(&spec.problem, spec.gen_seed)?;
    for m in &spec.methods {
        check_compatible(&problem, m)?;
    }
    let prep = prepare(spec, problem)?;

    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let meta_text: String = meta.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    write_atomic(&out.join("problem.meta"), meta_text.as_bytes())?;

    let seeds: Vec<u64> = (seed_lo..seed_hi).collect();
    let jobs: Vec<(usize, u64)> = (0..spec.methods.len())
        .flat_map(|mi| seeds.iter().map(move |&s| (mi, s)))
        .collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunStats>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let workers = threads.max(1).min(jobs.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= jobs.len() {
                    break;
                }
                let (mi, seed) = jobs[idx];
                let res = run_one(&prep, &spec.methods[mi], seed, spec, out);
                results.lock().unwrap()[idx] = Some(res);
            });
        }
    });

    let results = results.into_inner().expect("no worker panicked");
    let mut stats = Vec::with_capacity(jobs.len());
    for r in results {
        stats.push(r.expect("every job ran")?);
    }

    let summaries: Vec<MethodSummary> = spec
        .methods
        .iter()
        .enumerate()
        .map(|(mi, m)| aggregate(m.label(), &stats[mi * seeds.len()..(mi + 1) * seeds.len()]))
        .collect();
    write_summary(out, &summaries)?;
    Ok(summaries)
}

/// Recomputes `summary.csv` from the trace files already in `out`; useful
/// after ad hoc deletion or to re-rank under a different tolerance (edit
/// the spec, keep the traces). Produces exactly the bytes `run` would.
pub fn summarize(
    spec: &ExperimentSpec,
    out: &Path,
    seed_override: Option<(u64, u64)>,
) -> Result<Vec<MethodSummary>> {
    let (seed_lo, seed_hi) = seed_override.unwrap_or(spec.seeds);
    let mut summaries = Vec::new();
    for m in &spec.methods {
        let mut stats = Vec::new();
        for seed in seed_lo..seed_hi {
            let path = trace_path(out, &m.label(), seed);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let rows = parse_trace_csv(&text, &path)?;
            stats.push(stats_from_rows(rows.into_iter(), spec.tolerance));
        }
        summaries.push(aggregate(m.label(), &stats));
    }
    write_summary(out, &summaries)?;
    Ok(summaries)
}

fn parse_trace_csv(text: &str, path: &Path) -> Result<Vec<(u64, f64, f64, u128)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "k,f_gap,grad_sq,coord,wall_ns")) => {}
        _ => return Err(Error::parse(path, 1, "missing trace header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::parse(path, i + 1, "expected 5 columns"));
        }
        let bad = |what: &str| Error::parse(path, i + 1, format!("bad {what}"));
        rows.push((
            fields[0].parse().map_err(|_| bad("iteration"))?,
            fields[1].parse().map_err(|_| bad("f_gap"))?,
            fields[2].parse().map_err(|_| bad("grad_sq"))?,
            fields[4].parse().map_err(|_| bad("wall_ns"))?,
        ));
    }
    Ok(rows)
}
