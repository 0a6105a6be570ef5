//! Every solver in the crate on a single quadratic, one line each.
//!
//! Run with `cargo run --release --example baselines_tour`.

use acdsolve::acdm::{self, AcdmConfig, Mode};
use acdsolve::baselines::{agd_run, cdm_run, cg_solve, gd_run, quadratic_value};
use acdsolve::bench::{realize, Problem, ProblemSource};
use acdsolve::dense::spd_solve;
use acdsolve::oracle::{spd_parameters, SpdQuadraticOracle};

fn main() {
    let source = ProblemSource::Generator {
        name: "spd".into(),
        args: vec![
            ("n".into(), "150".into()),
            ("cond".into(), "500".into()),
            ("spectrum".into(), "linear".into()),
        ],
    };
    let (problem, _) = realize(&source, 5).expect("generator");
    let Problem::Quadratic { a, b } = problem else {
        unreachable!();
    };
    let p = spd_parameters(&a).expect("spectrum");
    let x_star = spd_solve(&a, &b).expect("reference");
    let f_star = quadratic_value(&a, &b, &x_star);
    let n = a.nrows();
    let x0 = vec![0.0; n];
    println!(
        "# n = {n}, cond = {:.1}, f* = {:.6e}",
        p.lmax / p.sigma,
        f_star
    );
    println!("\n{:<22} {:>12} {:>16}", "method", "iterations", "final gap");

    // Full-gradient methods count one gradient per iteration (n coordinate
    // partials worth of work); coordinate methods get n times the budget so
    // every row below spends comparable arithmetic.
    let grad_iters = 400;
    let coord_iters = grad_iters * n;

    let run = gd_run(&a, &b, &x0, p.lmax, grad_iters, Some(f_star), 0).expect("gd");
    println!(
        "{:<22} {grad_iters:>12} {:>16.6e}",
        "gradient descent",
        run.trace.rows().last().unwrap().f_gap
    );

    let run = agd_run(&a, &b, &x0, p.lmax, p.sigma, grad_iters, Some(f_star), 0).expect("agd");
    println!(
        "{:<22} {grad_iters:>12} {:>16.6e}",
        "accelerated gradient",
        run.trace.rows().last().unwrap().f_gap
    );

    let cg = cg_solve(&a, &b, &x0, 1e-14, grad_iters).expect("cg");
    println!(
        "{:<22} {:>12} {:>16.6e}",
        "conjugate gradient",
        cg.iterations,
        quadratic_value(&a, &b, &cg.x) - f_star
    );

    let run = cdm_run(&a, &b, &x0, 1.0, coord_iters, 1, Some(f_star), 0).expect("cdm");
    println!(
        "{:<22} {coord_iters:>12} {:>16.6e}",
        "coordinate descent",
        run.trace.rows().last().unwrap().f_gap
    );

    for (label, mode) in [("acdm (stable)", Mode::Stable), ("acdm (simple)", Mode::Simple)] {
        let cfg = AcdmConfig {
            mode,
            f_star: Some(f_star),
            ..AcdmConfig::iterations(1.0, p.sigma, coord_iters, 1)
        };
        let mut oracle = SpdQuadraticOracle::new(a.clone(), b.clone()).unwrap();
        let run = acdm::run(&mut oracle, &x0, &cfg).expect("acdm");
        println!(
            "{:<22} {coord_iters:>12} {:>16.6e}",
            label,
            run.trace.rows().last().unwrap().f_gap
        );
    }
}
