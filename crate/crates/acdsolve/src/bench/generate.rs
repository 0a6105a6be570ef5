//! Problem sources: files or seeded generators, plus sidecar metadata.
//!
//! Generators build instances with *known* spectra by rotating prescribed
//! diagonals, then re-measure the relevant quantities with the dense
//! reference routines; both the targets and the measurements land in the
//! metadata so a run directory is self-describing.
//!
//! Available generators:
//!
//! * `spd --n N [--spectrum geometric|linear] [--cond C]` — dense SPD
//!   matrix `Q diag(lambda) Q^T` with eigenvalues from 1 to `C`, Gaussian
//!   right-hand side;
//! * `gaussian --rows M --cols N [--kappa K]` — overdetermined consistent
//!   system; with `--kappa` the singular values are prescribed
//!   (linearly spaced from `K` down to 1) by rotation;
//! * `graph --n N [--m M]` — random connected graph (`M` total edges,
//!   default `2N`), log-uniform resistances, balanced Gaussian demand;
//! * `hard --n N --sigma S --s1 S1` — the chain lower-bound instance.

use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bench::spec::ProblemSource;
use crate::csr::CsrMatrix;
use crate::dense::{random_orthogonal, singular_value_range, symmetric_eigenvalues};
use crate::error::{Error, Result};
use crate::hardinstance::make_hard_instance;
use crate::io;
use crate::rng::{rng_from_seed, SolverRng};
use crate::sdd::{build_spanning_tree, measured_total_stretch, TreeStrategy, WeightedGraph};

#[derive(Debug, Clone)]
pub enum Problem {
    /// Minimize `1/2 x'Ax - b'x`, `A` square SPD.
    Quadratic { a: CsrMatrix, b: Vec<f64> },
    /// Overdetermined consistent `Ax = b` for row-action methods.
    LeastSquares { a: CsrMatrix, b: Vec<f64> },
    /// Electrical flow / Laplacian system on a graph.
    Flow { g: WeightedGraph, chi: Vec<f64> },
}

/// Materializes a problem. File sources ignore `gen_seed`; generator
/// sources are deterministic in it. The second return value is sidecar
/// metadata as ordered `key = value` pairs.
pub fn realize(source: &ProblemSource, gen_seed: u64) -> Result<(Problem, Vec<(String, String)>)> {
    match source {
        ProblemSource::MatrixFile { matrix, rhs } => {
            let a = io::read_matrix_market(matrix)?;
            let rhs = rhs
                .as_ref()
                .ok_or_else(|| Error::invalid("matrix problems need --rhs <file>"))?;
            let b = io::read_vector(rhs)?;
            if b.len() != a.nrows() {
                return Err(Error::invalid(format!(
                    "rhs has {} entries but the matrix has {} rows",
                    b.len(),
                    a.nrows()
                )));
            }
            let meta = vec![
                ("source".into(), "matrix file".into()),
                ("rows".into(), a.nrows().to_string()),
                ("cols".into(), a.ncols().to_string()),
            ];
            let problem = if a.nrows() == a.ncols() {
                Problem::Quadratic { a, b }
            } else if a.nrows() > a.ncols() {
                Problem::LeastSquares { a, b }
            } else {
                return Err(Error::invalid(
                    "underdetermined systems are not supported (rows < cols)",
                ));
            };
            Ok((problem, meta))
        }
        ProblemSource::EdgeFile { edges, demand } => {
            let list = io::read_edge_list(edges)?;
            let n = list
                .iter()
                .map(|&(u, v, _)| u.max(v) + 1)
                .max()
                .ok_or_else(|| Error::invalid("edge list is empty"))?;
            let g = WeightedGraph::new(n, &list)?;
            let chi = match demand {
                Some(path) => io::read_vector(path)?,
                // Unit dipole between the first and last vertices.
                None => {
                    let mut chi = vec![0.0; n];
                    chi[0] = 1.0;
                    chi[n - 1] = -1.0;
                    chi
                }
            };
            let meta = vec![
                ("source".into(), "edge list".into()),
                ("n".into(), n.to_string()),
                ("m".into(), g.m().to_string()),
            ];
            Ok((Problem::Flow { g, chi }, meta))
        }
        ProblemSource::Generator { name, args } => generate(name, args, gen_seed),
    }
}

fn generate(
    name: &str,
    args: &[(String, String)],
    gen_seed: u64,
) -> Result<(Problem, Vec<(String, String)>)> {
    match name {
        "spd" => gen_spd(args, gen_seed),
        "gaussian" => gen_gaussian(args, gen_seed),
        "graph" => gen_graph(args, gen_seed),
        "hard" => gen_hard(args),
        other => Err(Error::invalid(format!(
            "unknown generator `{other}` (available: spd gaussian graph hard)"
        ))),
    }
}

fn lookup<'a>(args: &'a [(String, String)], key: &str) -> Option<&'a str> {
    args.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn required<T: std::str::FromStr>(args: &[(String, String)], key: &str) -> Result<T> {
    let v = lookup(args, key)
        .ok_or_else(|| Error::invalid(format!("generator needs `--{key}`")))?;
    v.parse()
        .map_err(|_| Error::invalid(format!("bad value for `--{key}`: {v}")))
}

fn optional<T: std::str::FromStr>(args: &[(String, String)], key: &str, default: T) -> Result<T> {
    match lookup(args, key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| Error::invalid(format!("bad value for `--{key}`: {v}"))),
    }
}

fn gaussian_vec(n: usize, rng: &mut SolverRng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn gen_spd(args: &[(String, String)], gen_seed: u64) -> Result<(Problem, Vec<(String, String)>)> {
    let n: usize = required(args, "n")?;
    if n < 2 {
        return Err(Error::invalid("spd generator needs n >= 2"));
    }
    let cond: f64 = optional(args, "cond", 100.0)?;
    if !(cond >= 1.0) {
        return Err(Error::invalid("condition number must be >= 1"));
    }
    let spectrum = lookup(args, "spectrum").unwrap_or("geometric");
    let lambdas: Vec<f64> = match spectrum {
        "geometric" => (0..n)
            .map(|i| cond.powf(i as f64 / (n - 1) as f64))
            .collect(),
        "linear" => (0..n)
            .map(|i| 1.0 + (cond - 1.0) * i as f64 / (n - 1) as f64)
            .collect(),
        other => {
            return Err(Error::invalid(format!(
                "unknown spectrum `{other}` (use geometric or linear)"
            )))
        }
    };

    let mut rng = rng_from_seed(gen_seed);
    let q = random_orthogonal(n, &mut rng);
    let mut dense = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut v = 0.0;
            for (k, &lk) in lambdas.iter().enumerate() {
                v += q[i][k] * lk * q[j][k];
            }
            dense[i][j] = v;
            dense[j][i] = v;
        }
    }
    let a = CsrMatrix::from_dense(&dense)?;
    let b = gaussian_vec(n, &mut rng);

    let measured = symmetric_eigenvalues(&a)?;
    let (lmin, lmax) = (measured[0], *measured.last().unwrap());
    let meta = vec![
        ("generator".into(), "spd".into()),
        ("n".into(), n.to_string()),
        ("spectrum".into(), spectrum.to_string()),
        ("cond_target".into(), format!("{cond:.17e}")),
        ("cond_measured".into(), format!("{:.17e}", lmax / lmin)),
        ("lambda_min".into(), format!("{lmin:.17e}")),
        ("lambda_max".into(), format!("{lmax:.17e}")),
        ("gen_seed".into(), gen_seed.to_string()),
    ];
    Ok((Problem::Quadratic { a, b }, meta))
}

fn gen_gaussian(
    args: &[(String, String)],
    gen_seed: u64,
) -> Result<(Problem, Vec<(String, String)>)> {
    let rows: usize = required(args, "rows")?;
    let cols: usize = required(args, "cols")?;
    if rows < cols || cols == 0 {
        return Err(Error::invalid("gaussian generator needs rows >= cols >= 1"));
    }
    let kappa: Option<f64> = match lookup(args, "kappa") {
        None => None,
        Some(v) => Some(
            v.parse()
                .map_err(|_| Error::invalid(format!("bad value for `--kappa`: {v}")))?,
        ),
    };

    let mut rng = rng_from_seed(gen_seed);
    let dense: Vec<Vec<f64>> = match kappa {
        None => (0..rows).map(|_| gaussian_vec(cols, &mut rng)).collect(),
        Some(k) => {
            if !(k >= 1.0) {
                return Err(Error::invalid("kappa must be >= 1"));
            }
            // U Sigma V^T with singular values linearly spaced in [1, k]:
            // exact conditioning by construction.
            let u = random_orthogonal(rows, &mut rng);
            let v = random_orthogonal(cols, &mut rng);
            let sigmas: Vec<f64> = (0..cols)
                .map(|i| {
                    if cols == 1 {
                        k
                    } else {
                        k - (k - 1.0) * i as f64 / (cols - 1) as f64
                    }
                })
                .collect();
            (0..rows)
                .map(|i| {
                    (0..cols)
                        .map(|j| (0..cols).map(|t| u[i][t] * sigmas[t] * v[j][t]).sum())
                        .collect()
                })
                .collect()
        }
    };
    let a = CsrMatrix::from_dense(&dense)?;
    // Consistent by construction; row-action methods converge to x_true.
    let x_true = gaussian_vec(cols, &mut rng);
    let b = a.mul_vec(&x_true);

    let (smin, smax) = singular_value_range(&a)?;
    let meta = vec![
        ("generator".into(), "gaussian".into()),
        ("rows".into(), rows.to_string()),
        ("cols".into(), cols.to_string()),
        (
            "kappa_target".into(),
            kappa.map_or("none".into(), |k| format!("{k:.17e}")),
        ),
        ("kappa_measured".into(), format!("{:.17e}", smax / smin)),
        ("gen_seed".into(), gen_seed.to_string()),
    ];
    Ok((Problem::LeastSquares { a, b }, meta))
}

fn gen_graph(args: &[(String, String)], gen_seed: u64) -> Result<(Problem, Vec<(String, String)>)> {
    let n: usize = required(args, "n")?;
    if n < 2 {
        return Err(Error::invalid("graph generator needs n >= 2"));
    }
    let m: usize = optional(args, "m", 2 * n)?;
    if m < n - 1 {
        return Err(Error::invalid(format!(
            "a connected graph on {n} vertices needs at least {} edges",
            n - 1
        )));
    }
    let mut rng = rng_from_seed(gen_seed);
    let mut edges: Vec<(usize, usize, f64)> = (1..n)
        .map(|v| {
            (
                rng.gen_range(0..v),
                v,
                10f64.powf(rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push((u, v, 10f64.powf(rng.gen_range(-1.0..1.0))));
        }
    }
    let g = WeightedGraph::new(n, &edges)?;
    let mut chi = gaussian_vec(n, &mut rng);
    let mean = chi.iter().sum::<f64>() / n as f64;
    for c in chi.iter_mut() {
        *c -= mean;
    }

    let tree = build_spanning_tree(&g, TreeStrategy::MinResistance)?;
    let meta = vec![
        ("generator".into(), "graph".into()),
        ("n".into(), n.to_string()),
        ("m".into(), g.m().to_string()),
        ("off_tree_edges".into(), tree.off_tree().len().to_string()),
        (
            "total_stretch_s1".into(),
            format!("{:.17e}", measured_total_stretch(&tree)),
        ),
        ("gen_seed".into(), gen_seed.to_string()),
    ];
    Ok((Problem::Flow { g, chi }, meta))
}

fn gen_hard(args: &[(String, String)]) -> Result<(Problem, Vec<(String, String)>)> {
    let n: usize = required(args, "n")?;
    let sigma: f64 = required(args, "sigma")?;
    let s1: f64 = required(args, "s1")?;
    let inst = make_hard_instance(n, sigma, s1)?;
    let meta = vec![
        ("generator".into(), "hard".into()),
        ("n".into(), n.to_string()),
        ("sigma".into(), format!("{sigma:.17e}")),
        ("s1".into(), format!("{s1:.17e}")),
        ("lipschitz".into(), format!("{:.17e}", inst.l)),
        ("q".into(), format!("{:.17e}", inst.q)),
    ];
    Ok((
        Problem::Quadratic {
            a: inst.matrix,
            b: inst.rhs,
        },
        meta,
    ))
}

/// Writes the problem to `out` in the external formats (matrix market /
/// vector / edge list) plus a `problem.meta` sidecar. Returns the paths
/// written.
pub fn write_problem_files(
    source: &ProblemSource,
    gen_seed: u64,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    let (problem, meta) = realize(source, gen_seed)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::new();
    match &problem {
        Problem::Quadratic { a, b } | Problem::LeastSquares { a, b } => {
            let mpath = out.join("matrix.mtx");
            io::write_matrix_market(&mpath, a)?;
            written.push(mpath);
            let bpath = out.join("rhs.vec");
            io::write_vector(&bpath, b)?;
            written.push(bpath);
        }
        Problem::Flow { g, chi } => {
            let epath = out.join("graph.edges");
            let list: Vec<(usize, usize, f64)> =
                g.edges().iter().map(|e| (e.u, e.v, e.r)).collect();
            io::write_edge_list(&epath, &list)?;
            written.push(epath);
            let cpath = out.join("demand.vec");
            io::write_vector(&cpath, chi)?;
            written.push(cpath);
        }
    }
    let mut text = String::new();
    for (k, v) in &meta {
        text.push_str(&format!("{k} = {v}\n"));
    }
    let mpath = out.join("problem.meta");
    io::write_atomic(&mpath, text.as_bytes())?;
    written.push(mpath);
    Ok(written)
}
