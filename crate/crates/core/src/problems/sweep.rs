use crate::config::SolverConfig;
use crate::descent::MAX_HALVINGS;
use crate::error::{Error, Result};
use crate::linalg;
use crate::moo::{objective_angle, ParameterVector, ParetoPoint};
use crate::problem::Problem;
use crate::rng::{derive_seed, rng_from_seed};

/// Outcome of minimizing one weighted sum.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub weights: Vec<f64>,
    pub point: Option<ParetoPoint>,
    /// Descent iterations spent, converged or not.
    pub iters: usize,
    pub error: Option<String>,
}

/// `g` evenly spaced two-task weight vectors from `(1, 0)` to `(0, 1)`; a
/// single point is the equal-weight vector.
pub fn two_task_grid(g: usize) -> Vec<Vec<f64>> {
    match g {
        0 => Vec::new(),
        1 => vec![vec![0.5, 0.5]],
        _ => (0..g)
            .map(|j| {
                let t = j as f64 / (g - 1) as f64;
                vec![1.0 - t, t]
            })
            .collect(),
    }
}

fn weighted_loss<P: Problem + ?Sized>(problem: &P, theta: &[f64], w: &[f64]) -> Result<f64> {
    Ok(linalg::dot(&problem.evaluate(theta)?, w))
}

/// Returns the outcome and the number of accepted steps.
fn minimize_weighted<P: Problem + ?Sized>(
    problem: &P,
    weights: &[f64],
    mut theta: Vec<f64>,
    config: &SolverConfig,
) -> (Result<ParetoPoint>, usize) {
    let mut iters = 0;
    let outcome = loop {
        let grad = match problem.weighted_gradient(&theta, weights) {
            Ok(g) => g,
            Err(e) => break Err(e),
        };
        let gnorm = linalg::norm(&grad);
        let stalled = gnorm > config.stationarity_tol
            && iters < config.max_iters
            && !armijo_step(problem, &mut theta, &grad, weights, config);
        if gnorm <= config.stationarity_tol || iters >= config.max_iters || stalled {
            let point = finish(problem, &theta, weights, gnorm, iters);
            break match point {
                Ok(p) if gnorm > 10.0 * config.stationarity_tol => Err(Error::NonConvergence {
                    iters,
                    stationarity: gnorm,
                    best: Box::new(p),
                }),
                other => other,
            };
        }
        iters += 1;
    };
    (outcome, iters)
}

/// Backtracking step along `−grad` on the weighted loss; false if none is
/// accepted.
fn armijo_step<P: Problem + ?Sized>(
    problem: &P,
    theta: &mut Vec<f64>,
    grad: &[f64],
    weights: &[f64],
    config: &SolverConfig,
) -> bool {
    let Ok(base) = weighted_loss(problem, theta, weights) else {
        return false;
    };
    let slope = -linalg::dot(grad, grad);
    let mut step = config.step_init;
    for _ in 0..=MAX_HALVINGS {
        let trial = linalg::add_scaled(theta, -step, grad);
        if let Ok(value) = weighted_loss(problem, &trial, weights) {
            if value - base <= config.armijo_c * step * slope {
                *theta = trial;
                return true;
            }
        }
        step *= config.backtrack_factor;
    }
    false
}

fn finish<P: Problem + ?Sized>(
    problem: &P,
    theta: &[f64],
    weights: &[f64],
    stationarity: f64,
    iters: usize,
) -> Result<ParetoPoint> {
    let losses = problem.evaluate(theta)?;
    let angle = objective_angle(&losses)?;
    Ok(ParetoPoint {
        theta: ParameterVector::new(theta.to_vec())?,
        losses,
        kkt_weights: weights.to_vec(),
        stationarity,
        angle,
        region_index: None,
        iters_used: iters,
    })
}

/// Weighted-sum baseline: minimizes `Σ ω_m L_m` for every weight vector by
/// Armijo gradient descent, each from its own seeded random start.
pub fn scalarization_sweep<P: Problem + ?Sized>(
    problem: &P,
    weight_grid: &[Vec<f64>],
    config: &SolverConfig,
) -> Result<Vec<SweepEntry>> {
    config.validate()?;
    let mut entries = Vec::with_capacity(weight_grid.len());
    for (j, weights) in weight_grid.iter().enumerate() {
        Error::check_len(problem.num_tasks(), weights.len())?;
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("weights {weights:?} are not on the simplex")));
        }
        let mut rng = rng_from_seed(derive_seed(config.master_seed, j as u64));
        let theta0 = problem.sample_initial(&mut rng);
        let (outcome, iters) = minimize_weighted(problem, weights, theta0, config);
        let (point, error) = match outcome {
            Ok(p) => (Some(p), None),
            Err(e) => (None, Some(e.to_string())),
        };
        entries.push(SweepEntry { weights: weights.clone(), point, iters, error });
    }
    Ok(entries)
}
