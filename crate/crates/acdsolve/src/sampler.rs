//! Discrete sampling in O(1) via the alias method.
//!
//! Coordinate methods draw millions of indices from a fixed distribution
//! `p_i ~ w_i`, so construction may be O(n) but each draw must be O(1). The
//! alias method (Vose's variant) splits the normalized histogram into `n`
//! equal-mass columns, each covering at most two categories: a draw picks a
//! column uniformly and then flips a biased coin between the column's own
//! category and its alias.

use crate::error::{Error, Result};
use rand::distributions::Distribution;
use rand::Rng;

/// Alias table over `0..n` with `P(i)` proportional to the input weight `w_i`.
#[derive(Debug, Clone)]
pub struct AliasSampler {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasSampler {
    /// Builds the table. Weights must be finite and nonnegative with at
    /// least one strictly positive entry.
    pub fn new(weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::invalid("alias sampler needs at least one weight"));
        }
        let mut total = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::invalid(format!(
                    "sampling weight {w} at index {i} must be finite and nonnegative"
                )));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::invalid("at least one sampling weight must be positive"));
        }

        // Scaled probabilities p_i * n; each alias column holds mass 1.
        let mut scaled: Vec<f64> = weights.iter().map(|&w| w * n as f64 / total).collect();
        let mut prob = vec![0.0; n];
        let mut alias = vec![0usize; n];
        let mut small: Vec<usize> = Vec::with_capacity(n);
        let mut large: Vec<usize> = Vec::with_capacity(n);
        for (i, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = scaled[s];
            alias[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are full columns up to rounding.
        for &i in small.iter().chain(large.iter()) {
            prob[i] = 1.0;
            alias[i] = i;
        }
        Ok(AliasSampler { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// Draws one index: a uniform column and a biased coin, both from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let col = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[col] {
            col
        } else {
            self.alias[col]
        }
    }

    /// Recovers the probability of each category implied by the table. Used
    /// to check the construction against the normalized input weights.
    pub fn reconstructed_probabilities(&self) -> Vec<f64> {
        let n = self.prob.len();
        let mut p = vec![0.0; n];
        for i in 0..n {
            p[i] += self.prob[i];
            p[self.alias[i]] += 1.0 - self.prob[i];
        }
        for v in p.iter_mut() {
            *v /= n as f64;
        }
        p
    }
}

impl Distribution<usize> for AliasSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        AliasSampler::sample(self, rng)
    }
}

/// One draw from the distribution proportional to `weights`; convenience
/// wrapper that builds no table and is O(n). Prefer [`AliasSampler`] when
/// drawing repeatedly.
pub fn alias_sample<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    Ok(AliasSampler::new(weights)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn single_category() {
        let s = AliasSampler::new(&[2.7]).unwrap();
        let mut rng = rng_from_seed(0);
        for _ in 0..100 {
            assert_eq!(s.sample(&mut rng), 0);
        }
    }

    #[test]
    fn two_categories_frequency() {
        let s = AliasSampler::new(&[1.0, 3.0]).unwrap();
        let mut rng = rng_from_seed(42);
        let draws = 1_000_000;
        let ones = (0..draws).filter(|_| s.sample(&mut rng) == 1).count();
        let freq = ones as f64 / draws as f64;
        assert!((freq - 0.75).abs() < 0.005, "frequency {freq}");
    }

    #[test]
    fn uniform_weights_uniform_frequencies() {
        let n = 8;
        let s = AliasSampler::new(&vec![1.0; n]).unwrap();
        let mut rng = rng_from_seed(3);
        let draws = 1_000_000;
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            counts[s.sample(&mut rng)] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / n as f64).abs() < 0.005, "frequency {freq}");
        }
    }

    #[test]
    fn reconstruction_matches_normalized_weights() {
        let mut rng = rng_from_seed(11);
        for _ in 0..50 {
            use rand::Rng;
            let n = rng.gen_range(1..30);
            let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 10.0).collect();
            let total: f64 = w.iter().sum();
            if total == 0.0 {
                continue;
            }
            let s = AliasSampler::new(&w).unwrap();
            let rec = s.reconstructed_probabilities();
            for i in 0..n {
                assert!(
                    (rec[i] - w[i] / total).abs() < 1e-12,
                    "category {i}: reconstructed {} vs {}",
                    rec[i],
                    w[i] / total
                );
            }
        }
    }

    #[test]
    fn zero_weight_categories_never_drawn() {
        let s = AliasSampler::new(&[0.0, 1.0, 0.0, 2.0]).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..10_000 {
            let i = s.sample(&mut rng);
            assert!(i == 1 || i == 3);
        }
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(AliasSampler::new(&[]).is_err());
        assert!(AliasSampler::new(&[0.0, 0.0]).is_err());
        assert!(AliasSampler::new(&[-1.0, 2.0]).is_err());
        assert!(AliasSampler::new(&[f64::NAN]).is_err());
        assert!(AliasSampler::new(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn chi_square_goodness_of_fit() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let mut rng = rng_from_seed(2024);
        for trial in 0..20 {
            use rand::Rng;
            let n = rng.gen_range(2..20);
            let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.05).collect();
            let total: f64 = w.iter().sum();
            let s = AliasSampler::new(&w).unwrap();
            let draws = 1_000_000usize;
            let mut counts = vec![0usize; n];
            for _ in 0..draws {
                counts[s.sample(&mut rng)] += 1;
            }
            let chi2: f64 = (0..n)
                .map(|i| {
                    let expected = draws as f64 * w[i] / total;
                    let d = counts[i] as f64 - expected;
                    d * d / expected
                })
                .sum();
            let dist = ChiSquared::new((n - 1) as f64).unwrap();
            let p = 1.0 - dist.cdf(chi2);
            assert!(p > 0.001, "trial {trial}: chi2 {chi2}, p {p}");
        }
    }
}
