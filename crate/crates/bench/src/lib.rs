//! Experiment harness for the pdadapt solvers: configured runs with CSV
//! traces and comparisons between traces.

pub mod compare;
pub mod config;
pub mod problems;
pub mod run;
pub mod trace;

pub use compare::{compare_runs, Comparison};
pub use config::{Algorithm, Measure, ProblemKind, ProblemSpec, RunConfig, Strategy};
pub use problems::{build_problem, synthetic_classification, synthetic_regression};
pub use run::{run_experiment, RunOutcome, StopReason, Summary};
pub use trace::{read_trace_file, write_trace_file, TraceRow};
