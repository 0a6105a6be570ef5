//! Randomized Kaczmarz against its accelerated variant on an
//! ill-conditioned overdetermined system.
//!
//! Run with `cargo run --release --example kaczmarz_race`.

use acdsolve::baselines::rk_run;
use acdsolve::bench::{realize, Problem, ProblemSource};
use acdsolve::dense::spd_solve;
use acdsolve::kaczmarz::{ark_run, ArkConfig, ArkProblem};
use acdsolve::CsrMatrix;

/// Least-squares solution through the normal equations; fine at this size.
fn normal_solve(a: &CsrMatrix, b: &[f64]) -> Vec<f64> {
    let dense = a.to_dense();
    let n = a.ncols();
    let mut ata = vec![vec![0.0; n]; n];
    let mut atb = vec![0.0; n];
    for (row, &bi) in dense.iter().zip(b) {
        for j in 0..n {
            atb[j] += row[j] * bi;
            for l in 0..n {
                ata[j][l] += row[j] * row[l];
            }
        }
    }
    spd_solve(&CsrMatrix::from_dense(&ata).expect("ata"), &atb).expect("normal equations")
}

fn main() {
    let source = ProblemSource::Generator {
        name: "gaussian".into(),
        args: vec![
            ("rows".into(), "300".into()),
            ("cols".into(), "60".into()),
            ("kappa".into(), "50".into()),
        ],
    };
    let (problem, _) = realize(&source, 11).expect("generator");
    let Problem::LeastSquares { a, b } = problem else {
        unreachable!("gaussian generator yields a least-squares system");
    };
    let x_star = normal_solve(&a, &b);

    let p = ArkProblem::with_measured_sigma(a.clone(), b.clone()).expect("rank check");
    // The relevant condition number for row-action methods compares the
    // whole Frobenius mass against the smallest singular value.
    println!(
        "# rows = {}, cols = {}, kappa = ||A||_F / sigma_min = {:.1}",
        a.nrows(),
        a.ncols(),
        p.kappa()
    );

    let iters = 200_000;
    let every = 20_000;
    let x0 = vec![0.0; a.ncols()];
    let plain = rk_run(&a, &b, &x0, iters, 3, Some(&x_star), every).expect("rk");
    let cfg = ArkConfig {
        record_every: every,
        x_star: Some(x_star.clone()),
        ..ArkConfig::new(iters, 3)
    };
    let accelerated = ark_run(&p, &cfg).expect("ark");

    println!(
        "\n{:>10} {:>18} {:>18}",
        "projection", "rk dist^2", "ark dist^2"
    );
    for row in accelerated.trace.rows() {
        let k = row.k;
        match plain.trace.rows().iter().find(|r| r.k == k) {
            Some(r) => println!("{k:>10} {:>18.6e} {:>18.6e}", r.f_gap, row.f_gap),
            None => println!("{k:>10} {:>18} {:>18.6e}", "-", row.f_gap),
        }
    }
    println!(
        "\nfinal residuals: plain {:.3e}, accelerated {:.3e} (stop: {:?})",
        p.residual_sq(&plain.x),
        p.residual_sq(&accelerated.x),
        accelerated.stop
    );
}
