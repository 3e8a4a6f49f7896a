//! Experiment runner for the `psst-core` solvers: seeded runs written as CSV
//! and JSON, a weighted-sum baseline, gradient checks and residual reports.

pub mod cli;
pub mod output;
pub mod report;

pub use cli::main_with_args;
