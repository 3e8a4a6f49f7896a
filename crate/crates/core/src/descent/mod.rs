//! Multiple-gradient descent, with and without preference-region constraints.

mod line_search;
mod min_norm;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use line_search::{line_search, MAX_HALVINGS};
pub use min_norm::{min_norm_in_hull, MinNormSolution};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::linalg;
use crate::moo::{objective_angle, ObjectiveVector, ParameterVector, ParetoPoint};
use crate::preference::{activated_sets, constraint_values, cos_angle_gradient, Subregion};
use crate::problem::Problem;

/// Dual weights of the direction subproblem, split by constraint family.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    /// Task weights `ω_m`.
    pub omega: Vec<f64>,
    /// Lower-ray constraint weights `β_k`, keyed by region index.
    pub beta: BTreeMap<usize, f64>,
    /// Upper-ray constraint weights `γ_j`, keyed by region index.
    pub gamma: BTreeMap<usize, f64>,
}

impl Multipliers {
    pub fn total(&self) -> f64 {
        self.omega.iter().sum::<f64>() + self.beta.values().sum::<f64>() + self.gamma.values().sum::<f64>()
    }

    /// Task weights rescaled to sum to one, if any task weight is positive.
    pub fn task_weights(&self) -> Option<Vec<f64>> {
        let s: f64 = self.omega.iter().sum();
        (s > 0.0).then(|| self.omega.iter().map(|w| w / s).collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSets {
    pub q_active: BTreeSet<usize>,
    pub r_active: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentDirection {
    pub d: Vec<f64>,
    /// `max_v v · d` over every vector in the subproblem.
    pub alpha: f64,
    pub multipliers: Multipliers,
    pub active: ActiveSets,
    /// The min-norm solve hit its iteration cap.
    pub approximate: bool,
}

impl DescentDirection {
    pub fn norm(&self) -> f64 {
        linalg::norm(&self.d)
    }
}

fn direction_from_vectors(
    vectors: &[Vec<f64>],
    tasks: usize,
    active: ActiveSets,
    config: &SolverConfig,
) -> Result<DescentDirection> {
    let sol = min_norm_in_hull(vectors, config.fw_tol, config.fw_max_iters)?;
    let d: Vec<f64> = sol.point.iter().map(|v| -v).collect();
    let alpha = vectors
        .iter()
        .map(|v| linalg::dot(v, &d))
        .fold(f64::NEG_INFINITY, f64::max);

    let mut extra = sol.weights[tasks..].iter().copied();
    let beta = active.q_active.iter().map(|&i| (i, extra.next().unwrap_or(0.0))).collect();
    let gamma = active.r_active.iter().map(|&j| (j, extra.next().unwrap_or(0.0))).collect();
    let multipliers = Multipliers { omega: sol.weights[..tasks].to_vec(), beta, gamma };

    Ok(DescentDirection { d, alpha, multipliers, active, approximate: !sol.converged })
}

/// Common descent direction of all tasks: the negated min-norm element of the
/// gradient hull.
pub fn mgda_direction<P: Problem + ?Sized>(
    problem: &P,
    theta: &[f64],
    config: &SolverConfig,
) -> Result<DescentDirection> {
    let grads = problem.gradients(theta)?;
    direction_from_vectors(&grads, grads.len(), ActiveSets::default(), config)
}

/// Descent direction that also reduces every region constraint within
/// `active_eps` of violation.
pub fn constrained_direction<P: Problem + ?Sized>(
    problem: &P,
    theta: &[f64],
    region: &Subregion,
    config: &SolverConfig,
) -> Result<DescentDirection> {
    let losses = problem.evaluate(theta)?;
    let mut vectors = problem.gradients(theta)?;
    let tasks = vectors.len();
    let active = activated_sets(&losses, region, config.active_eps)?;
    if !active.is_empty() {
        let grad_q = cos_angle_gradient(&losses, &vectors)?;
        if !active.q_active.is_empty() {
            vectors.push(grad_q.clone());
        }
        if !active.r_active.is_empty() {
            vectors.push(grad_q.iter().map(|v| -v).collect());
        }
    }
    direction_from_vectors(&vectors, tasks, active, config)
}

/// Norm of the min-norm element of the task-gradient hull; zero exactly at
/// Pareto-stationary points.
pub fn stationarity_measure<P: Problem + ?Sized>(
    problem: &P,
    theta: &[f64],
    config: &SolverConfig,
) -> Result<f64> {
    Ok(mgda_direction(problem, theta, config)?.norm())
}

fn direction_at<P: Problem + ?Sized>(
    problem: &P,
    theta: &[f64],
    region: Option<&Subregion>,
    config: &SolverConfig,
) -> Result<DescentDirection> {
    match region {
        Some(r) => constrained_direction(problem, theta, r, config),
        None => mgda_direction(problem, theta, config),
    }
}

fn make_point<P: Problem + ?Sized>(
    problem: &P,
    theta: Vec<f64>,
    stationarity: f64,
    region: Option<&Subregion>,
    iters_used: usize,
    config: &SolverConfig,
) -> Result<ParetoPoint> {
    let losses: ObjectiveVector = problem.evaluate(&theta)?;
    // λ is taken from the task-only hull so that Σ λ_m ∇L_m is the residual the
    // tangent system is built on, regardless of constraint multipliers.
    let kkt_weights = mgda_direction(problem, &theta, config)?.multipliers.omega;
    let angle = objective_angle(&losses)?;
    Ok(ParetoPoint {
        theta: ParameterVector::new(theta)?,
        losses,
        kkt_weights,
        stationarity,
        angle,
        region_index: region.map(|r| r.index),
        iters_used,
    })
}

/// Gradient steps on the violated region constraint alone until the losses'
/// angle is back inside `region`. Each accepted step counts as an iteration.
fn restore_feasibility<P: Problem + ?Sized>(
    problem: &P,
    theta: &mut Vec<f64>,
    region: &Subregion,
    iters: &mut usize,
    config: &SolverConfig,
) -> Result<()> {
    let violation = |theta: &[f64]| -> Result<f64> {
        let (q, r) = constraint_values(&problem.evaluate(theta)?, region)?;
        Ok(q.max(r))
    };
    while *iters < config.max_iters {
        let losses = problem.evaluate(theta)?;
        let (q, r) = constraint_values(&losses, region)?;
        if q <= 0.0 && r <= 0.0 {
            break;
        }
        let sign = if q > 0.0 { 1.0 } else { -1.0 };
        let grad = linalg::scaled(sign, &cos_angle_gradient(&losses, &problem.gradients(theta)?)?);
        let slope = -linalg::dot(&grad, &grad);
        if !(slope < 0.0) {
            break;
        }
        let current = q.max(r);
        let mut step = config.step_init;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial = linalg::add_scaled(theta, -step, &grad);
            if matches!(violation(&trial), Ok(v) if v - current <= config.armijo_c * step * slope) {
                *theta = trial;
                accepted = true;
                break;
            }
            step *= config.backtrack_factor;
        }
        if !accepted {
            break;
        }
        *iters += 1;
    }
    Ok(())
}

/// Iterates direction + line search until the direction norm reaches
/// `stationarity_tol`, the iteration cap, or a stalled line search. With a
/// region, an infeasible start is first moved inside it.
///
/// A stalled or capped run still returns a point when its stationarity is
/// within ten times the tolerance; otherwise the best iterate rides along in
/// [`Error::NonConvergence`].
pub fn descend_to_pareto<P: Problem + ?Sized>(
    problem: &P,
    theta0: &[f64],
    region: Option<&Subregion>,
    config: &SolverConfig,
) -> Result<ParetoPoint> {
    Error::check_len(problem.dim(), theta0.len())?;
    if !linalg::all_finite(theta0) {
        return Err(Error::NonFinite("initial parameters"));
    }
    let mut theta = theta0.to_vec();
    let mut iters = 0;
    if let Some(r) = region {
        restore_feasibility(problem, &mut theta, r, &mut iters, config)?;
    }
    let mut dir = direction_at(problem, &theta, region, config)?;
    loop {
        if dir.norm() <= config.stationarity_tol {
            return make_point(problem, theta, dir.norm(), region, iters, config);
        }
        if iters >= config.max_iters {
            break;
        }
        match line_search(problem, &theta, &dir, region, config) {
            Ok(step) => {
                linalg::axpy(step, &dir.d, &mut theta);
                iters += 1;
            }
            Err(Error::Stall { .. }) => break,
            Err(e) => return Err(e),
        }
        dir = direction_at(problem, &theta, region, config)?;
    }
    let stationarity = dir.norm();
    let point = make_point(problem, theta, stationarity, region, iters, config)?;
    if stationarity <= 10.0 * config.stationarity_tol {
        Ok(point)
    } else {
        Err(Error::NonConvergence { iters, stationarity, best: Box::new(point) })
    }
}

#[cfg(test)]
mod tests;
