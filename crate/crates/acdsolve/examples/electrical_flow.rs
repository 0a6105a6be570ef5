//! Electrical-flow Laplacian solve with its optimality certificate.
//!
//! Run with `cargo run --release --example electrical_flow`.

use acdsolve::bench::{realize, Problem, ProblemSource};
use acdsolve::dense::laplacian_solve;
use acdsolve::sdd::{conservation_residual, solve_laplacian, LaplacianConfig};

fn main() {
    let source = ProblemSource::Generator {
        name: "graph".into(),
        args: vec![
            ("n".into(), "400".into()),
            ("m".into(), "1600".into()),
        ],
    };
    let (problem, _) = realize(&source, 97).expect("generator");
    let Problem::Flow { g, chi } = problem else {
        unreachable!("graph generator yields a flow problem");
    };
    println!("# graph: {} vertices, {} edges", g.n(), g.m());

    let cfg = LaplacianConfig::new(1e-6, 5);
    let sol = solve_laplacian(&g, &chi, &cfg).expect("flow solve");

    println!(
        "# tree S_1 = {:.1}, iterations = {}, certificate checks = {}",
        sol.tree_stretch, sol.iterations, sol.certificate_checks
    );
    // The dual certificate: the flow routes the demand exactly, and the gap
    // between flow energy and the potential lower bound brackets the error.
    println!(
        "conservation residual  {:.3e}",
        conservation_residual(&g, &sol.flow, &chi)
    );
    println!("flow energy            {:.9e}", sol.energy);
    println!("duality gap            {:.3e}", sol.duality_gap);

    // Against the dense ground truth (feasible here; the solver never needs
    // this).
    let lap = g.laplacian();
    let x_ref = laplacian_solve(&lap, &chi).expect("dense reference");
    let center = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|&x| x - m).collect::<Vec<_>>()
    };
    let got = center(&sol.potentials);
    let want = center(&x_ref);
    let diff: Vec<f64> = got.iter().zip(&want).map(|(a, b)| a - b).collect();
    let l_norm = |d: &[f64]| {
        let ld = lap.mul_vec(d);
        d.iter().zip(&ld).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
    };
    println!(
        "energy-norm error      {:.3e} (relative {:.3e})",
        l_norm(&diff),
        l_norm(&diff) / l_norm(&want)
    );
}
