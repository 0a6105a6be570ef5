//! Oracle for the least-squares dual `f(y) = (1/2) |A^T y|^2 - <b, y>`.
//!
//! For consistent `A x = b` the minimizer satisfies `A^T y* = x*`, so
//! iterating on the dual and reading off `A^T y` solves the primal system.
//! The caches ARE that primal image: `x_u = A^T u` and `x_w = A^T w`, both
//! length `ncols`. The dual registers are never used in any computation on
//! the fast path — a partial query needs one row scan of `A`:
//! `f_i(c1 u + c2 w) = <a_i, c1 x_u + c2 x_w> - b_i`, and a register
//! increment adds a multiple of `a_i` to the cache. This keeps every
//! iteration O(nnz(a_i)) even though the dual dimension is the (large) row
//! count.

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};
use crate::oracle::{CoordinateOracle, Register};

#[derive(Debug, Clone)]
pub struct DualLeastSquaresOracle {
    a: CsrMatrix,
    b: Vec<f64>,
    row_norms_sq: Vec<f64>,
    u: Vec<f64>,
    w: Vec<f64>,
    xu: Vec<f64>,
    xw: Vec<f64>,
    increments: usize,
    rebuild_every: usize,
}

impl DualLeastSquaresOracle {
    /// `a` is the m x n system matrix (typically m >= n), `b` the
    /// right-hand side of `A x = b`. Zero rows are rejected: they have
    /// `L_i = 0` and carry no information about `x`.
    pub fn new(a: CsrMatrix, b: Vec<f64>) -> Result<Self> {
        let m = a.nrows();
        if b.len() != m {
            return Err(Error::invalid("right-hand side length mismatch"));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("right-hand side must be finite"));
        }
        let row_norms_sq: Vec<f64> = (0..m)
            .map(|i| {
                let (_, vals) = a.row(i);
                vals.iter().map(|v| v * v).sum()
            })
            .collect();
        if let Some(i) = row_norms_sq.iter().position(|&r| r <= 0.0) {
            return Err(Error::invalid(format!(
                "row {i} of the system matrix is zero"
            )));
        }
        let n = a.ncols();
        Ok(DualLeastSquaresOracle {
            a,
            b,
            row_norms_sq,
            u: vec![0.0; m],
            w: vec![0.0; m],
            xu: vec![0.0; n],
            xw: vec![0.0; n],
            increments: 0,
            rebuild_every: 10 * m.max(1),
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn row_norms_sq(&self) -> &[f64] {
        &self.row_norms_sq
    }

    /// `|A|_F^2`, summed in the same order as the per-row constants so that
    /// `sum_i lipschitz(i)` reproduces it exactly.
    pub fn fro_norm_sq(&self) -> f64 {
        self.row_norms_sq.iter().sum()
    }

    /// The primal point `A^T (c1 u + c2 w)`, read straight off the caches.
    pub fn primal_combination(&self, c1: f64, c2: f64) -> Vec<f64> {
        self.xu
            .iter()
            .zip(&self.xw)
            .map(|(&xu, &xw)| c1 * xu + c2 * xw)
            .collect()
    }

    fn transpose_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.a.ncols()];
        for i in 0..self.a.nrows() {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            let (cols, vals) = self.a.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                x[c] += yi * v;
            }
        }
        x
    }

    fn rebuild_caches(&mut self) {
        self.xu = self.transpose_mul(&self.u);
        self.xw = self.transpose_mul(&self.w);
        self.increments = 0;
    }
}

impl CoordinateOracle for DualLeastSquaresOracle {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn lipschitz(&self, i: usize) -> f64 {
        self.row_norms_sq[i]
    }

    fn registers(&self) -> (&[f64], &[f64]) {
        (&self.u, &self.w)
    }

    fn partial(&self, i: usize, c1: f64, c2: f64) -> f64 {
        let (cols, vals) = self.a.row(i);
        let mut dot = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            dot += v * (c1 * self.xu[c] + c2 * self.xw[c]);
        }
        dot - self.b[i]
    }

    fn notify_increment(&mut self, reg: Register, i: usize, delta: f64) {
        let (target, cache) = match reg {
            Register::U => (&mut self.u, &mut self.xu),
            Register::W => (&mut self.w, &mut self.xw),
        };
        target[i] += delta;
        let (cols, vals) = self.a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            cache[c] += delta * v;
        }
        self.increments += 1;
        if self.increments >= self.rebuild_every {
            self.rebuild_caches();
        }
    }

    fn set_registers(&mut self, u: &[f64], w: &[f64]) {
        assert_eq!(u.len(), self.dim(), "register length mismatch");
        assert_eq!(w.len(), self.dim(), "register length mismatch");
        self.u.copy_from_slice(u);
        self.w.copy_from_slice(w);
        self.rebuild_caches();
    }

    fn value(&self, y: &[f64]) -> f64 {
        assert_eq!(y.len(), self.dim(), "dimension mismatch");
        let x = self.transpose_mul(y);
        let quad: f64 = x.iter().map(|v| v * v).sum();
        let lin: f64 = y.iter().zip(&self.b).map(|(&yi, &bi)| yi * bi).sum();
        0.5 * quad - lin
    }
}
