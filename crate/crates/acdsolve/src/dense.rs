//! Desk-scale dense linear algebra (reference computations only).
//!
//! The iterative solvers in this crate never factorize anything. Tests and
//! instance generators, however, need ground truth: exact minimizers,
//! spectra, singular values, orthogonal rotations. This module wraps
//! `nalgebra` for those jobs and is intended for dimensions up to a few
//! thousand.

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};
use crate::rng::SolverRng;
use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

fn to_dmatrix(a: &CsrMatrix) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            m[(i, c)] = v;
        }
    }
    m
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &CsrMatrix) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::invalid("eigenvalues require a square matrix"));
    }
    if a.asymmetry() > 1e-10 {
        return Err(Error::invalid("matrix is not symmetric"));
    }
    let m = to_dmatrix(a);
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ev)
}

/// Solves `A x = b` for symmetric positive definite `A` by dense Cholesky.
pub fn spd_solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(Error::invalid("spd_solve dimension mismatch"));
    }
    let m = to_dmatrix(a);
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::numerical("Cholesky failed: matrix not positive definite"))?;
    let x = chol.solve(&DVector::from_column_slice(b));
    Ok(x.iter().copied().collect())
}

/// Solves `L x = chi` for a graph Laplacian `L` (singular, nullspace = span
/// of the all-ones vector), returning the mean-zero solution. Requires
/// `sum(chi) = 0`; the rank-one shift `L + (1/n) 11^T` makes the system
/// positive definite without moving the solution off the mean-zero slice.
pub fn laplacian_solve(l: &CsrMatrix, chi: &[f64]) -> Result<Vec<f64>> {
    let n = l.nrows();
    if l.ncols() != n || chi.len() != n {
        return Err(Error::invalid("laplacian_solve dimension mismatch"));
    }
    let total: f64 = chi.iter().sum();
    if total.abs() > 1e-9 * (1.0 + chi.iter().map(|c| c.abs()).sum::<f64>()) {
        return Err(Error::invalid("laplacian_solve demands must sum to zero"));
    }
    let mut m = to_dmatrix(l);
    let shift = 1.0 / n as f64;
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += shift;
        }
    }
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::numerical("Cholesky failed on shifted Laplacian"))?;
    let x = chol.solve(&DVector::from_column_slice(chi));
    let mean = x.iter().sum::<f64>() / n as f64;
    Ok(x.iter().map(|v| v - mean).collect())
}

/// Smallest and largest singular values of a rectangular matrix.
pub fn singular_value_range(a: &CsrMatrix) -> Result<(f64, f64)> {
    let m = to_dmatrix(a);
    let svd = m.svd(false, false);
    let mut smin = f64::INFINITY;
    let mut smax = 0.0f64;
    for &s in svd.singular_values.iter() {
        smin = smin.min(s);
        smax = smax.max(s);
    }
    if !smin.is_finite() {
        return Err(Error::numerical("SVD produced no singular values"));
    }
    Ok((smin, smax))
}

/// Frobenius norm of a sparse matrix.
pub fn frobenius_norm(a: &CsrMatrix) -> f64 {
    let (_, _, values) = a.raw_parts();
    values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A Haar-ish random orthogonal matrix: QR of a standard Gaussian matrix
/// with the sign convention fixed so the factorization is unique.
pub fn random_orthogonal(n: usize, rng: &mut SolverRng) -> Vec<Vec<f64>> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r_diag: Vec<f64> = (0..n).map(|i| qr.r()[(i, i)]).collect();
    let q = qr.q();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            // Flip column signs where R has a negative diagonal.
            let s = if r_diag[j] < 0.0 { -1.0 } else { 1.0 };
            out[i][j] = s * q[(i, j)];
        }
    }
    out
}
