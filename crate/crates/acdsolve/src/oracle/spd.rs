//! Oracle for `f(x) = (1/2) x^T A x - b^T x` with symmetric positive
//! definite `A`.
//!
//! The caches are the products `A u` and `A w`. A coordinate increment
//! `u[i] += d` shifts `A u` by `d` times column `i`, which by symmetry is
//! row `i` — one sparse row scan. A partial query is then O(1):
//! `f_i(c1 u + c2 w) = c1 (A u)_i + c2 (A w)_i - b_i`.

use crate::csr::{csr_row_dot, CsrMatrix};
use crate::error::{Error, Result};
use crate::oracle::{CoordinateOracle, Register};

#[derive(Debug, Clone)]
pub struct SpdQuadraticOracle {
    a: CsrMatrix,
    b: Vec<f64>,
    diag: Vec<f64>,
    u: Vec<f64>,
    w: Vec<f64>,
    au: Vec<f64>,
    aw: Vec<f64>,
    increments: usize,
    rebuild_every: usize,
}

impl SpdQuadraticOracle {
    /// Requires a square symmetric matrix with strictly positive diagonal
    /// (every positive definite matrix has one; a zero diagonal entry would
    /// mean a coordinate with no curvature, i.e. `L_i = 0`).
    pub fn new(a: CsrMatrix, b: Vec<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::invalid("quadratic oracle needs a square matrix"));
        }
        if b.len() != n {
            return Err(Error::invalid("right-hand side length mismatch"));
        }
        if a.asymmetry() > 1e-10 {
            return Err(Error::invalid("quadratic oracle needs a symmetric matrix"));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("right-hand side must be finite"));
        }
        let diag: Vec<f64> = (0..n).map(|i| a.diagonal(i)).collect();
        if let Some(i) = diag.iter().position(|&d| d <= 0.0) {
            return Err(Error::invalid(format!(
                "diagonal entry {} at coordinate {i} gives Lipschitz constant <= 0",
                diag[i]
            )));
        }
        Ok(SpdQuadraticOracle {
            a,
            b,
            diag,
            u: vec![0.0; n],
            w: vec![0.0; n],
            au: vec![0.0; n],
            aw: vec![0.0; n],
            increments: 0,
            rebuild_every: 10 * n.max(1),
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    fn rebuild_caches(&mut self) {
        self.au = self.a.mul_vec(&self.u);
        self.aw = self.a.mul_vec(&self.w);
        self.increments = 0;
    }
}

impl CoordinateOracle for SpdQuadraticOracle {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn lipschitz(&self, i: usize) -> f64 {
        self.diag[i]
    }

    fn registers(&self) -> (&[f64], &[f64]) {
        (&self.u, &self.w)
    }

    fn partial(&self, i: usize, c1: f64, c2: f64) -> f64 {
        c1 * self.au[i] + c2 * self.aw[i] - self.b[i]
    }

    fn notify_increment(&mut self, reg: Register, i: usize, delta: f64) {
        let (target, cache) = match reg {
            Register::U => (&mut self.u, &mut self.au),
            Register::W => (&mut self.w, &mut self.aw),
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

    fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "dimension mismatch");
        let mut quad = 0.0;
        let mut lin = 0.0;
        for i in 0..x.len() {
            quad += x[i] * csr_row_dot(&self.a, i, x);
            lin += self.b[i] * x[i];
        }
        0.5 * quad - lin
    }
}
