//! Drive a multi-method benchmark from a spec string, the same path the
//! `acdbench` binary takes, and read the summary back.
//!
//! Run with `cargo run --release --example benchmark_spec`.

use acdsolve::bench::{parse_spec, run_experiment};

fn main() {
    let text = "\
problem = spd --n 120 --cond 300 --spectrum geometric
method = acdm --exponent 1 --mode stable
method = cdm --exponent 1
method = gd
method = cg
iters = 30000
record_every = 1000
tolerance = 1e-10
seeds = 0..4
gen_seed = 2
";
    let spec = parse_spec(text).expect("spec parses");
    let out = std::env::temp_dir().join("acdsolve-benchmark-example");
    std::fs::create_dir_all(&out).expect("output directory");

    let summaries = run_experiment(&spec, &out, 1, None).expect("experiment");

    println!("# wrote per-seed traces and summary.csv under {}", out.display());
    println!(
        "\n{:<16} {:>6} {:>6} {:>14} {:>16} {:>14}",
        "method", "seeds", "hits", "iters to tol", "mean final gap", "mean wall ms"
    );
    for s in &summaries {
        let to_tol = s
            .mean_iters_to_tol
            .map(|v| format!("{v:.0}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<16} {:>6} {:>6} {:>14} {:>16.6e} {:>14.2}",
            s.label, s.seeds, s.hits, to_tol, s.mean_final_gap, s.mean_wall_ms
        );
    }
}
