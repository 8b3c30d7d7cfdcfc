//! Simulation benchmark: the three test functions, replicated fits and
//! MSE summaries.

mod examples;
mod report;
mod runner;

pub use examples::{gen_dataset, mse, true_function, ExampleSpec};
pub use report::{format_float, write_report_csv, write_report_json, REPORT_HEADER};
pub use runner::{
    fit_replication, run_benchmark, sde2_subknots, BenchConfig, BenchmarkReport, ReportRow, DESK_BURN_IN,
    DESK_ITERATIONS, DESK_REPS,
};
