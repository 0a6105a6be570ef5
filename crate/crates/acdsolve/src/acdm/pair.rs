//! The implicit 2x2 change of basis over the oracle registers.
//!
//! The accelerated iteration updates two dense vectors `(v, y)` by affine
//! maps plus one-coordinate corrections:
//!
//! ```text
//! (v, y)_{k+1} = A_k (v, y)_k - s_k,     supp(s_k) = { i_k }.
//! ```
//!
//! Materializing that costs O(n) per step. Instead we keep registers
//! `(u, w)` inside the oracle and a matrix `B` with the invariant
//! `(v, y) = B (u, w)` (componentwise: `v = B00 u + B01 w`, etc.).
//! Multiplying `B <- A_k B` and incrementing the registers by
//! `-B^{-1} s_k` — two scalars on coordinate `i_k` — realizes the exact
//! same map in O(1) scalar work.
//!
//! Every `A_k` produced by the schedules has nonnegative entries and unit
//! row sums, so `B` stays a (row-stochastic) matrix with entries in [0, 1];
//! only its determinant decays, by the factor `det A_k < 1` per step. When
//! `|det B|` falls under [`DET_FLOOR`] the basis is renormalized: `(v, y)`
//! are materialized once, written back as the new registers, and `B` resets
//! to the identity.

use crate::oracle::CoordinateOracle;

/// Determinant floor under which [`ImplicitPair::needs_renormalization`]
/// fires. Entries of `B` are bounded by 1 (row-stochastic), so the floor is
/// an absolute threshold. Solving against `B` amplifies rounding error by
/// roughly `eps / det`, so the floor keeps per-step error near 1e-10 while
/// renormalizations stay rare (the determinant shrinks by `(1 - theta)^2`
/// per step, giving a period of several multiples of `n` between rebuilds).
pub const DET_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct ImplicitPair {
    b: [[f64; 2]; 2],
}

impl ImplicitPair {
    /// Fresh basis: `(v, y) = (u, w)`.
    pub fn identity() -> Self {
        ImplicitPair {
            b: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.b
    }

    pub fn det(&self) -> f64 {
        self.b[0][0] * self.b[1][1] - self.b[0][1] * self.b[1][0]
    }

    /// Coefficients expressing `v` in the registers.
    pub fn v_row(&self) -> (f64, f64) {
        (self.b[0][0], self.b[0][1])
    }

    /// Coefficients expressing `y` in the registers.
    pub fn y_row(&self) -> (f64, f64) {
        (self.b[1][0], self.b[1][1])
    }

    /// `B <- A B`.
    pub fn apply_left(&mut self, a: [[f64; 2]; 2]) {
        let b = self.b;
        self.b = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
    }

    /// Solves `B d = rhs` by Cramer's rule.
    pub fn solve(&self, rhs: [f64; 2]) -> [f64; 2] {
        let det = self.det();
        [
            (rhs[0] * self.b[1][1] - rhs[1] * self.b[0][1]) / det,
            (self.b[0][0] * rhs[1] - self.b[1][0] * rhs[0]) / det,
        ]
    }

    pub fn needs_renormalization(&self) -> bool {
        self.det().abs() < DET_FLOOR
    }

    /// Materializes `(v, y)` from the oracle registers; O(n).
    pub fn materialize<O: CoordinateOracle>(&self, oracle: &O) -> (Vec<f64>, Vec<f64>) {
        let (u, w) = oracle.registers();
        let v = u
            .iter()
            .zip(w)
            .map(|(&ui, &wi)| self.b[0][0] * ui + self.b[0][1] * wi)
            .collect();
        let y = u
            .iter()
            .zip(w)
            .map(|(&ui, &wi)| self.b[1][0] * ui + self.b[1][1] * wi)
            .collect();
        (v, y)
    }

    /// Materializes `(v, y)`, installs them as the new registers, and
    /// resets `B` to the identity. O(n) plus one oracle cache rebuild.
    pub fn renormalize<O: CoordinateOracle>(&mut self, oracle: &mut O) {
        let (v, y) = self.materialize(oracle);
        oracle.set_registers(&v, &y);
        self.b = [[1.0, 0.0], [0.0, 1.0]];
    }
}
