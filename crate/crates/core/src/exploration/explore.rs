use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::descent::descend_to_pareto;
use crate::error::{Error, Result};
use crate::exploration::tangent::{choose_betas, tangent_direction};
use crate::linalg;
use crate::moo::{ParetoPoint, ParetoSet};
use crate::preference::{constraint_values, Subregion};
use crate::problem::Problem;

/// Work counters for one expansion or one region.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCounters {
    pub descent_iters: usize,
    pub tangent_solves: usize,
}

impl std::ops::AddAssign for WorkCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.descent_iters += rhs.descent_iters;
        self.tangent_solves += rhs.tangent_solves;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub points: Vec<ParetoPoint>,
    pub work: WorkCounters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionOutcome {
    pub set: ParetoSet,
    pub work: WorkCounters,
    /// Why the seed produced no admissible point, if it did not.
    pub error: Option<String>,
}

fn in_region(point: &ParetoPoint, region: Option<&Subregion>, eps: f64) -> bool {
    match region {
        None => true,
        Some(r) => match constraint_values(&point.losses, r) {
            Ok((q, rr)) => q <= eps && rr <= eps,
            Err(_) => false,
        },
    }
}

/// `‖Σ λ_m ∇L_m(θ)‖` for the point's own KKT weights.
pub fn kkt_residual<P: Problem + ?Sized>(problem: &P, point: &ParetoPoint) -> Result<f64> {
    Ok(linalg::norm(&problem.weighted_gradient(&point.theta, &point.kkt_weights)?))
}

/// Stationary for its subproblem, Pareto-stationary for the tasks alone, and
/// inside the region. The second test rejects dominated points where a region
/// ray meets a disconnected piece of the feasible set.
fn admissible<P: Problem + ?Sized>(
    problem: &P,
    point: &ParetoPoint,
    region: Option<&Subregion>,
    config: &SolverConfig,
) -> bool {
    let kkt_tol = config.stationarity_tol.max(10.0 * config.fw_tol);
    point.stationarity <= config.stationarity_tol
        && matches!(kkt_residual(problem, point), Ok(r) if r <= kkt_tol)
        && in_region(point, region, config.active_eps)
}

/// Spawns up to two neighbours of `point`: a tangent step per β followed by a
/// constrained correction. A candidate is kept when it is admissible and at least `novelty_delta` away from `known` and from the
/// other candidate. Failed corrections only drop their candidate.
pub fn expand_point<P: Problem + ?Sized>(
    problem: &P,
    point: &ParetoPoint,
    region: Option<&Subregion>,
    known: &ParetoSet,
    config: &SolverConfig,
) -> Result<Expansion> {
    let mut work = WorkCounters::default();
    let mut points: Vec<ParetoPoint> = Vec::new();
    for beta in choose_betas(&point.kkt_weights, problem.num_tasks())? {
        let tangent = match tangent_direction(problem, point, &beta, config) {
            Ok(t) => t,
            Err(Error::NullTangent) => continue,
            Err(e) => return Err(e),
        };
        work.tangent_solves += 1;
        let start = linalg::add_scaled(&point.theta, config.expand_step, &tangent.direction);
        let candidate = match descend_to_pareto(problem, &start, region, config) {
            Ok(p) => p,
            Err(Error::NonConvergence { iters, .. }) => {
                work.descent_iters += iters;
                continue;
            }
            Err(_) => continue,
        };
        work.descent_iters += candidate.iters_used;
        let novel = known.is_novel(&candidate.losses, config.novelty_delta)
            && points
                .iter()
                .all(|p| linalg::distance(&p.losses, &candidate.losses) >= config.novelty_delta);
        if admissible(problem, &candidate, region, config) && novel {
            points.push(candidate);
        }
    }
    Ok(Expansion { points, work })
}

/// Corrects `seed_theta` into the region, then grows the region's set
/// breadth-first until the queue drains or `region_budget` points are held.
///
/// `region = None` explores the whole front; `set_index` labels the set.
pub fn explore_region<P: Problem + ?Sized>(
    problem: &P,
    seed_theta: &[f64],
    region: Option<&Subregion>,
    set_index: usize,
    config: &SolverConfig,
) -> RegionOutcome {
    let mut set = ParetoSet::new(set_index);
    let mut work = WorkCounters::default();
    let seed = match descend_to_pareto(problem, seed_theta, region, config) {
        Ok(p) => p,
        Err(e) => {
            if let Error::NonConvergence { iters, .. } = &e {
                work.descent_iters += iters;
            }
            return RegionOutcome { set, work, error: Some(e.to_string()) };
        }
    };
    work.descent_iters += seed.iters_used;
    if !admissible(problem, &seed, region, config) {
        return RegionOutcome {
            set,
            work,
            error: Some(format!(
                "corrected seed is not admissible (stationarity {:e}, angle {})",
                seed.stationarity, seed.angle
            )),
        };
    }

    let mut queue = VecDeque::from([0usize]);
    set.push(seed);
    while let Some(idx) = queue.pop_front() {
        if set.len() >= config.region_budget {
            break;
        }
        let current = set.points[idx].clone();
        let expansion = match expand_point(problem, &current, region, &set, config) {
            Ok(e) => e,
            Err(_) => continue,
        };
        work += expansion.work;
        for p in expansion.points {
            if set.len() >= config.region_budget {
                break;
            }
            queue.push_back(set.len());
            set.push(p);
        }
    }
    RegionOutcome { set, work, error: None }
}
