//! Gradient-based multi-objective optimization for a main task trained
//! alongside auxiliary tasks.
//!
//! The pipeline finds a balanced Pareto-stationary point with multiple
//! gradient descent, splits the objective-space wedge where the main task is
//! favoured into angular subregions, and explores the Pareto front inside
//! each subregion by tangent-plane continuation followed by constrained
//! correction.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod descent;
pub mod error;
pub mod exploration;
pub mod linalg;
pub mod moo;
pub mod preference;
pub mod problem;
pub mod problems;
pub mod rng;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use moo::{dominates, objective_angle, rho, ObjectiveVector, ParameterVector, ParetoPoint, ParetoSet};
pub use problem::Problem;
