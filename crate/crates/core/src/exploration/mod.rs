//! Tangent-plane continuation along the Pareto set and the region-by-region
//! exploration driver.

mod explore;
mod minres;
mod run;
mod tangent;

pub use explore::{expand_point, explore_region, kkt_residual, Expansion, RegionOutcome, WorkCounters};
pub use minres::{minres, MinresOutcome};
pub use run::{psst_run, psst_run_parallel, select_best, unrestricted_run, ExplorationReport, RegionSummary};
pub use tangent::{choose_betas, hessian_vector, hessian_vector_fd, hvp_step, tangent_direction, TangentSolve};
