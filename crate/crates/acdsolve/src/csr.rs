//! Compressed sparse row matrices.
//!
//! The solvers only ever touch a matrix one row at a time (a coordinate
//! oracle query reads one row, a register increment scans one row), so CSR
//! is the single storage format in the crate. Symmetric matrices are stored
//! with both triangles present; nothing here assumes or exploits symmetry.

use crate::error::{Error, Result};

/// Sparse matrix in compressed sparse row format.
///
/// Invariants, enforced at construction:
/// * `row_ptr` has length `nrows + 1`, is nondecreasing, starts at 0 and
///   ends at `values.len()`;
/// * column indices are strictly increasing within each row and `< ncols`;
/// * all stored values are finite and nonzero (explicit zeros are dropped,
///   duplicate triplets are summed).
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed; entries that are (or sum to) exactly zero are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::invalid(format!(
                    "triplet ({r}, {c}) out of bounds for {nrows}x{ncols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "non-finite value {v} at ({r}, {c})"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut iter = sorted.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v != 0.0 {
                row_ptr[r + 1] += 1;
                col_idx.push(c);
                values.push(v);
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Builds a matrix from raw CSR arrays, validating all invariants.
    pub fn from_raw(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != nrows + 1 {
            return Err(Error::invalid("row_ptr length must be nrows + 1"));
        }
        if row_ptr[0] != 0 || row_ptr[nrows] != values.len() || col_idx.len() != values.len() {
            return Err(Error::invalid("row_ptr endpoints inconsistent with nnz"));
        }
        for r in 0..nrows {
            if row_ptr[r] > row_ptr[r + 1] {
                return Err(Error::invalid("row_ptr must be nondecreasing"));
            }
            let mut prev: Option<usize> = None;
            for k in row_ptr[r]..row_ptr[r + 1] {
                let c = col_idx[k];
                if c >= ncols {
                    return Err(Error::invalid(format!("column index {c} out of bounds")));
                }
                if let Some(p) = prev {
                    if c <= p {
                        return Err(Error::invalid(
                            "column indices must be strictly increasing within a row",
                        ));
                    }
                }
                prev = Some(c);
                let v = values[k];
                if !v.is_finite() || v == 0.0 {
                    return Err(Error::invalid(
                        "stored values must be finite and nonzero",
                    ));
                }
            }
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Builds from a dense row-major matrix, dropping zeros.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::invalid("ragged dense matrix"));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &triplets)
    }

    /// The identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &triplets).expect("identity triplets are valid")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// The diagonal entry `A[i][i]`, 0.0 if not stored.
    pub fn diagonal(&self, i: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&i) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Dense `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "dimension mismatch in mul_vec");
        (0..self.nrows).map(|i| csr_row_dot(self, i, x)).collect()
    }

    /// Dense row-major copy; desk-scale tests and reference solves only.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out[i][c] = v;
            }
        }
        out
    }

    /// Maximum relative asymmetry `|A[i][j] - A[j][i]|` over stored entries,
    /// scaled by the largest absolute entry. Zero for exactly symmetric
    /// matrices; requires a square matrix.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.nrows, self.ncols, "asymmetry requires a square matrix");
        let scale = self
            .values
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let vt = {
                    let (tc, tv) = self.row(j);
                    match tc.binary_search(&i) {
                        Ok(k) => tv[k],
                        Err(_) => 0.0,
                    }
                };
                worst = worst.max((v - vt).abs() / scale);
            }
        }
        worst
    }

    pub(crate) fn raw_parts(&self) -> (&[usize], &[usize], &[f64]) {
        (&self.row_ptr, &self.col_idx, &self.values)
    }
}

/// Dot product of row `i` of `A` with a dense vector `x`.
pub fn csr_row_dot(a: &CsrMatrix, i: usize, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), a.ncols());
    let (cols, vals) = a.row(i);
    let mut acc = 0.0;
    for (&c, &v) in cols.iter().zip(vals) {
        acc += v * x[c];
    }
    acc
}
