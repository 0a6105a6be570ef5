//! Convergence traces and per-run operation counts.

use std::path::Path;

use crate::error::Result;
use crate::io::write_atomic;

/// One sampled point of a run. `f_gap` and `grad_sq` are NaN when the
/// quantity was not evaluated at this iteration (no reference optimum, or
/// gradient tracking off). `coord` is the coordinate updated at iteration
/// `k` (-1 for the initial row).
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub k: u64,
    pub f_gap: f64,
    pub grad_sq: f64,
    pub coord: i64,
    pub wall_ns: u128,
}

/// An append-only list of trace rows, serialized as CSV with the fixed
/// header `k,f_gap,grad_sq,coord,wall_ns`. Floats are printed with 17
/// significant digits so they round-trip exactly; two runs with the same
/// seed produce byte-identical CSV except for the wall-clock column.
#[derive(Debug, Clone, Default)]
pub struct ConvergenceTrace {
    rows: Vec<TraceRow>,
}

impl ConvergenceTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("k,f_gap,grad_sq,coord,wall_ns\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{},{}\n",
                r.k, r.f_gap, r.grad_sq, r.coord, r.wall_ns
            ));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), self.to_csv_string().as_bytes())
    }

    /// Equality of everything except the wall-clock column.
    pub fn same_modulo_wall(&self, other: &ConvergenceTrace) -> bool {
        self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.k == b.k
                    && a.coord == b.coord
                    && float_identical(a.f_gap, b.f_gap)
                    && float_identical(a.grad_sq, b.grad_sq)
            })
    }
}

fn float_identical(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b
}

/// Work counters for one run. The fast path of an iteration is one partial
/// query plus two register increments; everything dense (renormalizations,
/// noise injections, value or gradient samples) is counted separately so
/// tests can assert the O(1)-per-iteration claim on the counters
/// themselves rather than on wall time.
#[derive(Debug, Clone, Copy, Default)]
pub struct OpCounts {
    /// Completed iterations.
    pub iterations: usize,
    /// Partial-derivative queries from the iteration fast path.
    pub partials: usize,
    /// Single-coordinate register increments.
    pub increments: usize,
    /// Basis renormalizations (each costs one materialize + cache rebuild).
    pub renormalizations: usize,
    /// Dense register overwrites from noise injection.
    pub noise_injections: usize,
    /// Objective evaluations (value-gap checks, trace rows).
    pub value_evals: usize,
    /// Full-gradient evaluations (gradient tracking).
    pub gradient_evals: usize,
}

/// Strips the wall-clock column from CSV text; used by determinism checks
/// on files produced by the benchmark harness.
pub fn strip_wall_column(csv: &str) -> String {
    let mut out = String::with_capacity(csv.len());
    for line in csv.lines() {
        match line.rsplit_once(',') {
            Some((head, _wall)) => {
                out.push_str(head);
                out.push('\n');
            }
            None => {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}
