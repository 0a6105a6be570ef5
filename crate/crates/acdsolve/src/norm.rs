//! Diagonally weighted Euclidean norms.
//!
//! Convergence statements for coordinate methods are naturally expressed in
//! the norm `|x|_w^2 = sum_i w_i x_i^2` with weights `w_i = L_i^(1-a)` built
//! from the coordinate Lipschitz constants and the sampling exponent `a`.
//! The matching dual norm on gradients divides by the weights.

use crate::error::{Error, Result};

/// A norm `|x|^2 = sum_i w_i x_i^2` with strictly positive finite weights.
#[derive(Debug, Clone)]
pub struct WeightedNorm {
    weights: Vec<f64>,
}

impl WeightedNorm {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weighted norm needs at least one weight"));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!(
                    "norm weight {w} at index {i} must be finite and positive"
                )));
            }
        }
        Ok(WeightedNorm { weights })
    }

    /// Weights `L_i^p`; `p = 0` gives the Euclidean norm.
    pub fn from_lipschitz(lipschitz: &[f64], p: f64) -> Result<Self> {
        Self::new(lipschitz.iter().map(|&l| l.powf(p)).collect())
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn norm_sq(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.weights.len(), "dimension mismatch");
        x.iter()
            .zip(&self.weights)
            .map(|(&xi, &wi)| wi * xi * xi)
            .sum()
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.norm_sq(x).sqrt()
    }

    /// Dual (gradient) norm: `sum_i g_i^2 / w_i`.
    pub fn dual_norm_sq(&self, g: &[f64]) -> f64 {
        assert_eq!(g.len(), self.weights.len(), "dimension mismatch");
        g.iter()
            .zip(&self.weights)
            .map(|(&gi, &wi)| gi * gi / wi)
            .sum()
    }

    /// Distance `|x - y|` in this norm.
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), y.len(), "dimension mismatch");
        x.iter()
            .zip(y)
            .zip(&self.weights)
            .map(|((&xi, &yi), &wi)| wi * (xi - yi) * (xi - yi))
            .sum::<f64>()
            .sqrt()
    }
}

/// Convenience free function mirroring [`WeightedNorm::norm_sq`].
pub fn weighted_norm_sq(weights: &[f64], x: &[f64]) -> f64 {
    assert_eq!(weights.len(), x.len(), "dimension mismatch");
    weights
        .iter()
        .zip(x)
        .map(|(&wi, &xi)| wi * xi * xi)
        .sum()
}
