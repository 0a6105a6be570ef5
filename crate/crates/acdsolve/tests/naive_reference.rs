//! The implicit 2x2-basis engine against a literal O(n)-per-step
//! transcription of the accelerated iteration (see `common::NaiveAcdm`).
//!
//! Both sides share the seed, sampler, and coefficient schedule, so after
//! any number of steps the iterates must agree up to floating-point noise;
//! we require 1e-8 relative over 1000 steps on ten random instances.

#[allow(dead_code)]
mod common;

use acdsolve::acdm::Mode;
use common::compare_with_naive;

#[test]
fn implicit_matches_naive_over_ten_instances() {
    // Five adaptive-schedule and five fixed-theta runs, exponents spanning
    // [0, 1], 1000 steps each.
    let cases = [
        (1u64, 1.0, Mode::Stable),
        (2, 0.5, Mode::Stable),
        (3, 0.0, Mode::Stable),
        (4, 0.75, Mode::Stable),
        (5, 1.0, Mode::Stable),
        (6, 1.0, Mode::Simple),
        (7, 0.5, Mode::Simple),
        (8, 0.0, Mode::Simple),
        (9, 0.25, Mode::Simple),
        (10, 1.0, Mode::Simple),
    ];
    for &(seed, exponent, mode) in &cases {
        let dev = compare_with_naive(seed, exponent, mode, 1000).deviation;
        assert!(
            dev <= 1e-8,
            "seed {seed} exponent {exponent} {mode:?}: relative deviation {dev:e}"
        );
    }
}

#[test]
fn deviation_stays_small_through_renormalization() {
    // A long run on a small instance forces several basis rebuilds; the
    // naive side never rebuilds anything, so agreement here pins down the
    // renormalization path.
    let cmp = compare_with_naive(11, 1.0, Mode::Stable, 20_000);
    assert!(cmp.deviation <= 1e-8, "relative deviation {:e}", cmp.deviation);
    assert!(
        cmp.counts.renormalizations > 0,
        "20k steps should have rebuilt the basis at least once"
    );
}
