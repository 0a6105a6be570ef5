//! The experiment spec format: plain `key = value` lines.
//!
//! ```text
//! # comparison on a generated instance
//! problem = spd --n 100 --spectrum geometric --cond 1000
//! method = acdm --exponent 1 --mode stable
//! method = cdm --exponent 1
//! seeds = 0..50
//! iters = 20000
//! record_every = 100
//! tolerance = 1e-6
//! gen_seed = 7
//! ```
//!
//! `problem` is either a generator invocation (`spd`, `gaussian`, `graph`,
//! `hard`) or a file source (`matrix <path> --rhs <path>`,
//! `edges <path> --demand <path>`). `method` may repeat; each line becomes
//! one column of the comparison. Unknown keys are rejected rather than
//! ignored so typos fail loudly.

use std::path::PathBuf;

use crate::acdm::Mode;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum ProblemSource {
    MatrixFile {
        matrix: PathBuf,
        rhs: Option<PathBuf>,
    },
    EdgeFile {
        edges: PathBuf,
        demand: Option<PathBuf>,
    },
    Generator {
        name: String,
        args: Vec<(String, String)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Acdm { exponent: f64, mode: Mode },
    Cdm { exponent: f64 },
    Gd,
    Agd,
    Cg,
    Rk,
    Ark,
    Laplacian { epsilon: f64 },
}

impl MethodSpec {
    /// Stable identifier used in output file names and the summary table.
    pub fn label(&self) -> String {
        match self {
            MethodSpec::Acdm { exponent, mode } => {
                let m = match mode {
                    Mode::Simple => "simple",
                    Mode::Stable => "stable",
                };
                format!("acdm-{m}-a{exponent}")
            }
            MethodSpec::Cdm { exponent } => format!("cdm-a{exponent}"),
            MethodSpec::Gd => "gd".to_string(),
            MethodSpec::Agd => "agd".to_string(),
            MethodSpec::Cg => "cg".to_string(),
            MethodSpec::Rk => "rk".to_string(),
            MethodSpec::Ark => "ark".to_string(),
            MethodSpec::Laplacian { epsilon } => format!("laplacian-eps{epsilon}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub problem: ProblemSource,
    pub methods: Vec<MethodSpec>,
    /// Half-open seed range `[start, end)`.
    pub seeds: (u64, u64),
    /// Iteration budget per run.
    pub iters: usize,
    /// Trace stride; 0 records only the first and last iterations.
    pub record_every: usize,
    /// `f_gap` threshold for the summary's iterations-to-tolerance column.
    pub tolerance: f64,
    /// Seed for problem generation (independent of the run seeds).
    pub gen_seed: u64,
}

pub fn parse_spec(text: &str) -> Result<ExperimentSpec> {
    let mut problem = None;
    let mut methods = Vec::new();
    let mut seeds = (0u64, 1u64);
    let mut iters = None;
    let mut record_every = 0usize;
    let mut tolerance = 1e-6;
    let mut gen_seed = 0u64;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("line {}: expected `key = value`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "problem" => problem = Some(parse_problem(value)?),
            "method" => methods.push(parse_method(value)?),
            "seeds" => seeds = parse_seed_range(value)?,
            "iters" => {
                iters = Some(value.parse().map_err(|_| {
                    Error::invalid(format!("line {}: bad iteration count", lineno + 1))
                })?)
            }
            "record_every" => {
                record_every = value.parse().map_err(|_| {
                    Error::invalid(format!("line {}: bad record stride", lineno + 1))
                })?
            }
            "tolerance" => {
                tolerance = value
                    .parse()
                    .map_err(|_| Error::invalid(format!("line {}: bad tolerance", lineno + 1)))?
            }
            "gen_seed" => {
                gen_seed = value
                    .parse()
                    .map_err(|_| Error::invalid(format!("line {}: bad gen_seed", lineno + 1)))?
            }
            other => {
                return Err(Error::invalid(format!(
                    "line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }

    let problem = problem.ok_or_else(|| Error::invalid("spec is missing a `problem` line"))?;
    if methods.is_empty() {
        return Err(Error::invalid("spec needs at least one `method` line"));
    }
    let mut labels: Vec<String> = methods.iter().map(MethodSpec::label).collect();
    labels.sort();
    labels.dedup();
    if labels.len() != methods.len() {
        return Err(Error::invalid(
            "two method lines produce the same label; vary their parameters",
        ));
    }
    let iters = iters.ok_or_else(|| Error::invalid("spec is missing an `iters` line"))?;
    if iters == 0 {
        return Err(Error::invalid("iteration budget must be positive"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    Ok(ExperimentSpec {
        problem,
        methods,
        seeds,
        iters,
        record_every,
        tolerance,
        gen_seed,
    })
}

/// `a..b`, half-open, `a < b`.
pub fn parse_seed_range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::invalid(format!("seed range `{s}` is not of the form a..b")))?;
    let a: u64 = a
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad seed range start in `{s}`")))?;
    let b: u64 = b
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad seed range end in `{s}`")))?;
    if a >= b {
        return Err(Error::invalid(format!("seed range `{s}` is empty")));
    }
    Ok((a, b))
}

/// Splits `name --key value --key value ...` into the name and pairs.
fn parse_invocation(value: &str) -> Result<(String, Vec<(String, String)>)> {
    let mut tokens = value.split_whitespace();
    let name = tokens
        .next()
        .ok_or_else(|| Error::invalid("empty value"))?
        .to_string();
    let rest: Vec<&str> = tokens.collect();
    let mut args = Vec::new();
    let mut i = 0;
    while i < rest.len() {
        let key = rest[i]
            .strip_prefix("--")
            .ok_or_else(|| Error::invalid(format!("expected `--key`, found `{}`", rest[i])))?;
        let val = rest
            .get(i + 1)
            .ok_or_else(|| Error::invalid(format!("flag `--{key}` is missing its value")))?;
        args.push((key.to_string(), val.to_string()));
        i += 2;
    }
    Ok((name, args))
}

fn parse_problem(value: &str) -> Result<ProblemSource> {
    let name = value
        .split_whitespace()
        .next()
        .ok_or_else(|| Error::invalid("empty problem line"))?
        .to_string();
    match name.as_str() {
        "matrix" | "edges" => {
            let mut tokens = value.split_whitespace();
            tokens.next();
            let path = tokens
                .next()
                .ok_or_else(|| Error::invalid(format!("`{name}` needs a file path")))?;
            let rest: Vec<&str> = tokens.collect();
            let mut side = None;
            let mut i = 0;
            while i < rest.len() {
                match rest[i] {
                    "--rhs" if name == "matrix" => side = rest.get(i + 1).copied(),
                    "--demand" if name == "edges" => side = rest.get(i + 1).copied(),
                    other => {
                        return Err(Error::invalid(format!(
                            "unknown flag `{other}` for `{name}` problem"
                        )))
                    }
                }
                i += 2;
            }
            if name == "matrix" {
                Ok(ProblemSource::MatrixFile {
                    matrix: PathBuf::from(path),
                    rhs: side.map(PathBuf::from),
                })
            } else {
                Ok(ProblemSource::EdgeFile {
                    edges: PathBuf::from(path),
                    demand: side.map(PathBuf::from),
                })
            }
        }
        _ => {
            let (name, args) = parse_invocation(value)?;
            Ok(ProblemSource::Generator { name, args })
        }
    }
}

fn lookup(args: &[(String, String)], key: &str) -> Option<String> {
    args.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.clone())
}

fn float_arg(args: &[(String, String)], key: &str, default: f64) -> Result<f64> {
    match lookup(args, key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| Error::invalid(format!("bad value for `--{key}`: {v}"))),
    }
}

fn reject_unknown(args: &[(String, String)], known: &[&str], what: &str) -> Result<()> {
    for (k, _) in args {
        if !known.contains(&k.as_str()) {
            return Err(Error::invalid(format!("unknown flag `--{k}` for {what}")));
        }
    }
    Ok(())
}

fn parse_method(value: &str) -> Result<MethodSpec> {
    let (name, args) = parse_invocation(value)?;
    match name.as_str() {
        "acdm" => {
            reject_unknown(&args, &["exponent", "mode"], "acdm")?;
            let exponent = float_arg(&args, "exponent", 1.0)?;
            let mode = match lookup(&args, "mode").as_deref() {
                None | Some("stable") => Mode::Stable,
                Some("simple") => Mode::Simple,
                Some(other) => {
                    return Err(Error::invalid(format!(
                        "unknown acdm mode `{other}` (use simple or stable)"
                    )))
                }
            };
            Ok(MethodSpec::Acdm { exponent, mode })
        }
        "cdm" => {
            reject_unknown(&args, &["exponent"], "cdm")?;
            Ok(MethodSpec::Cdm {
                exponent: float_arg(&args, "exponent", 1.0)?,
            })
        }
        "gd" => {
            reject_unknown(&args, &[], "gd")?;
            Ok(MethodSpec::Gd)
        }
        "agd" => {
            reject_unknown(&args, &[], "agd")?;
            Ok(MethodSpec::Agd)
        }
        "cg" => {
            reject_unknown(&args, &[], "cg")?;
            Ok(MethodSpec::Cg)
        }
        "rk" => {
            reject_unknown(&args, &[], "rk")?;
            Ok(MethodSpec::Rk)
        }
        "ark" => {
            reject_unknown(&args, &[], "ark")?;
            Ok(MethodSpec::Ark)
        }
        "laplacian" => {
            reject_unknown(&args, &["epsilon"], "laplacian")?;
            Ok(MethodSpec::Laplacian {
                epsilon: float_arg(&args, "epsilon", 1e-4)?,
            })
        }
        other => Err(Error::invalid(format!(
            "unknown method `{other}` (available: acdm cdm gd agd cg rk ark laplacian)"
        ))),
    }
}
