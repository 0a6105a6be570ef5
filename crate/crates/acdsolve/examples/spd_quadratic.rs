//! Accelerated vs plain coordinate descent on one SPD quadratic.
//!
//! Run with `cargo run --release --example spd_quadratic`.

use acdsolve::acdm::{self, AcdmConfig};
use acdsolve::baselines::{cdm_run, quadratic_value};
use acdsolve::bench::{realize, Problem, ProblemSource};
use acdsolve::dense::spd_solve;
use acdsolve::oracle::{spd_parameters, SpdQuadraticOracle};

fn main() {
    let source = ProblemSource::Generator {
        name: "spd".into(),
        args: vec![
            ("n".into(), "200".into()),
            ("cond".into(), "1000".into()),
            ("spectrum".into(), "geometric".into()),
        ],
    };
    let (problem, meta) = realize(&source, 42).expect("generator");
    let Problem::Quadratic { a, b } = problem else {
        unreachable!("spd generator yields a quadratic");
    };
    for (k, v) in &meta {
        println!("# {k} = {v}");
    }

    let p = spd_parameters(&a).expect("spectrum");
    let x_star = spd_solve(&a, &b).expect("dense reference");
    let f_star = quadratic_value(&a, &b, &x_star);
    println!(
        "# sigma = {:.4e}, L_max = {:.4e}, S_1 = {:.4e}, f* = {:.6e}",
        p.sigma, p.lmax, p.s1, f_star
    );

    let x0 = vec![0.0; a.nrows()];
    let iters = 60_000;

    // Exponent 1 samples coordinates proportionally to their Lipschitz
    // constants; both methods see the identical instance and budget.
    let cfg = AcdmConfig {
        record_every: 10_000,
        f_star: Some(f_star),
        ..AcdmConfig::iterations(1.0, p.sigma, iters, 7)
    };
    let mut oracle = SpdQuadraticOracle::new(a.clone(), b.clone()).expect("oracle");
    let accelerated = acdm::run(&mut oracle, &x0, &cfg).expect("accelerated run");
    let plain = cdm_run(&a, &b, &x0, 1.0, iters, 7, Some(f_star), 10_000).expect("plain run");

    println!("\n{:>10} {:>16} {:>16}", "iteration", "acdm gap", "cdm gap");
    for (ra, rp) in accelerated.trace.rows().iter().zip(plain.trace.rows()) {
        println!("{:>10} {:>16.6e} {:>16.6e}", ra.k, ra.f_gap, rp.f_gap);
    }
    let c = accelerated.counts;
    println!(
        "\naccelerated work: {} partials, {} coordinate increments, {} renormalizations",
        c.partials, c.increments, c.renormalizations
    );
}
