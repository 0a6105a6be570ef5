//! Reproducible method comparisons driven by plain-text experiment specs.
//!
//! A spec names one problem (generated or loaded from files) and a list of
//! methods; [`run_experiment`] executes every (method, seed) pair, writes
//! one trace CSV per run plus a `summary.csv`, and is deterministic up to
//! the wall-clock columns. See [`spec`](self) for the file format.

mod generate;
mod run;
mod spec;

pub use generate::{realize, write_problem_files, Problem};
pub use run::{run_experiment, summarize, MethodSummary};
pub use spec::{parse_seed_range, parse_spec, ExperimentSpec, MethodSpec, ProblemSource};
