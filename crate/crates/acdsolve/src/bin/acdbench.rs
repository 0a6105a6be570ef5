//! Benchmark driver: runs experiment specs, generates problem files, and
//! recomputes summaries.
//!
//! Exit codes: 0 on success, 1 for input errors (bad flags, unreadable or
//! malformed spec, invalid problem parameters), 2 for numerical aborts
//! (solver breakdown, iteration budget exhausted before certification).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use acdsolve::bench::{parse_seed_range, parse_spec, run_experiment, summarize, write_problem_files, MethodSummary};
use acdsolve::Error;

#[derive(Parser)]
#[command(name = "acdbench", about = "Coordinate-descent benchmark harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// Experiment spec file (`key = value` lines).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (method, seed) pair and write traces plus summary.csv.
    Run {
        #[command(flatten)]
        common: SpecArgs,
        /// Override the spec's seed range, half-open `a..b`.
        #[arg(long)]
        seeds: Option<String>,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Write the spec's problem to files with a metadata sidecar.
    Gen {
        #[command(flatten)]
        common: SpecArgs,
    },
    /// Recompute summary.csv from trace files already in the output
    /// directory.
    Summarize {
        #[command(flatten)]
        common: SpecArgs,
        /// Seed range the traces were run with, if not the spec's.
        #[arg(long)]
        seeds: Option<String>,
    },
}

fn load_spec(path: &PathBuf) -> Result<acdsolve::bench::ExperimentSpec, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spec(&text)
}

fn seed_override(seeds: &Option<String>) -> Result<Option<(u64, u64)>, Error> {
    seeds.as_ref().map(|s| parse_seed_range(s)).transpose()
}

fn print_summaries(rows: &[MethodSummary]) {
    println!(
        "{:<24} {:>6} {:>6} {:>16} {:>14} {:>12}",
        "method", "seeds", "hits", "iters-to-tol", "final-gap", "wall-ms"
    );
    for r in rows {
        let iters = r
            .mean_iters_to_tol
            .map_or("-".to_string(), |v| format!("{v:.1}"));
        println!(
            "{:<24} {:>6} {:>6} {:>16} {:>14.3e} {:>12.2}",
            r.label, r.seeds, r.hits, iters, r.mean_final_gap, r.mean_wall_ms
        );
    }
}

fn real_main() -> Result<(), Error> {
    // Map clap's own failures (which default to exit code 2) onto the
    // input-error path so code 2 stays reserved for numerical aborts.
    let cli = Cli::try_parse().map_err(|e| {
        // Help and version are successful exits, not errors.
        if e.use_stderr() {
            Error::invalid(e.to_string())
        } else {
            print!("{e}");
            std::process::exit(0);
        }
    })?;
    match cli.command {
        Command::Run {
            common,
            seeds,
            threads,
        } => {
            let spec = load_spec(&common.spec)?;
            let rows = run_experiment(&spec, &common.out, threads, seed_override(&seeds)?)?;
            print_summaries(&rows);
        }
        Command::Gen { common } => {
            let spec = load_spec(&common.spec)?;
            let written = write_problem_files(&spec.problem, spec.gen_seed, &common.out)?;
            for p in written {
                println!("{}", p.display());
            }
        }
        Command::Summarize { common, seeds } => {
            let spec = load_spec(&common.spec)?;
            let rows = summarize(&spec, &common.out, seed_override(&seeds)?)?;
            print_summaries(&rows);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
