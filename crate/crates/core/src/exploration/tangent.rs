use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::exploration::minres::minres;
use crate::linalg;
use crate::moo::ParetoPoint;
use crate::problem::Problem;

/// A unit direction along the local Pareto set, from `H dθ = ∇Lᵀ β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentSolve {
    pub direction: Vec<f64>,
    /// True residual `‖∇Lᵀβ − H x‖` of the unnormalized solution.
    pub residual_norm: f64,
    pub krylov_iters: usize,
    pub beta: Vec<f64>,
    /// MINRES stopped at its iteration cap.
    pub approximate: bool,
}

/// Central-difference Hessian-vector product of `Σ λ_m L_m` with step `eps`.
pub fn hessian_vector_fd<P: Problem + ?Sized>(
    problem: &P,
    theta: &[f64],
    weights: &[f64],
    v: &[f64],
    eps: f64,
) -> Result<Vec<f64>> {
    let plus = problem.weighted_gradient(&linalg::add_scaled(theta, eps, v), weights)?;
    let minus = problem.weighted_gradient(&linalg::add_scaled(theta, -eps, v), weights)?;
    Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * eps)).collect())
}

/// Default finite-difference step for [`hessian_vector`].
pub fn hvp_step(theta: &[f64], v: &[f64]) -> f64 {
    1e-5 * (1.0 + linalg::norm(theta)) / (1.0 + linalg::norm(v))
}

/// `Σ λ_m ∇²L_m(θ) v`, exact when the problem supplies it and by central
/// differences of the weighted gradient otherwise.
pub fn hessian_vector<P: Problem + ?Sized>(
    problem: &P,
    theta: &[f64],
    weights: &[f64],
    v: &[f64],
) -> Result<Vec<f64>> {
    Error::check_len(problem.dim(), v.len())?;
    if v.iter().all(|x| *x == 0.0) {
        return Ok(vec![0.0; v.len()]);
    }
    match problem.hvp(theta, weights, v) {
        Some(result) => result,
        None => hessian_vector_fd(problem, theta, weights, v, hvp_step(theta, v)),
    }
}

/// The main-task axis with its `λ` component removed, in both signs.
///
/// When `e_1` is parallel to `λ` the construction starts from `e_2` instead.
pub fn choose_betas(lambda: &[f64], tasks: usize) -> Result<[Vec<f64>; 2]> {
    Error::check_len(tasks, lambda.len())?;
    if tasks < 2 {
        return Err(Error::InvalidArgument("need at least two tasks".into()));
    }
    let norm = linalg::norm(lambda);
    if norm == 0.0 {
        return Err(Error::Degenerate("λ is zero".into()));
    }
    let unit = linalg::scaled(1.0 / norm, lambda);
    let orthogonal = |axis: usize| {
        let mut b = vec![0.0; tasks];
        b[axis] = 1.0;
        linalg::axpy(-unit[axis], &unit, &mut b);
        b
    };
    let mut beta = orthogonal(0);
    if linalg::norm(&beta) <= 1e-12 {
        beta = orthogonal(1);
    }
    let beta = linalg::scaled(1.0 / linalg::norm(&beta), &beta);
    let negated = linalg::scaled(-1.0, &beta);
    Ok([beta, negated])
}

/// Solves `H(θ*) x = Σ β_m ∇L_m(θ*)` with MINRES, `H = Σ λ_m ∇²L_m`, and
/// returns `x/‖x‖`.
///
/// A right-hand side below `10 · stationarity_tol` is reported as
/// [`Error::NullTangent`]: that β does not move along the front.
pub fn tangent_direction<P: Problem + ?Sized>(
    problem: &P,
    point: &ParetoPoint,
    beta: &[f64],
    config: &SolverConfig,
) -> Result<TangentSolve> {
    Error::check_len(problem.num_tasks(), beta.len())?;
    let theta: &[f64] = &point.theta;
    let grads = problem.gradients(theta)?;
    let rhs = linalg::combine(beta, &grads);
    let rhs_norm = linalg::norm(&rhs);
    if rhs_norm <= 10.0 * config.stationarity_tol {
        return Err(Error::NullTangent);
    }
    let weights = &point.kkt_weights;
    let apply = |v: &[f64]| hessian_vector(problem, theta, weights, v);
    let out = minres(apply, &rhs, config.krylov_tol, config.krylov_max_iters)?;
    let hx = hessian_vector(problem, theta, weights, &out.x)?;
    let residual_norm = linalg::distance(&hx, &rhs);
    let len = linalg::norm(&out.x);
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::NullTangent);
    }
    Ok(TangentSolve {
        direction: linalg::scaled(1.0 / len, &out.x),
        residual_norm,
        krylov_iters: out.iterations,
        beta: beta.to_vec(),
        approximate: !out.converged,
    })
}
