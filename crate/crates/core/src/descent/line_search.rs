use crate::config::SolverConfig;
use crate::descent::DescentDirection;
use crate::error::{Error, Result};
use crate::linalg;
use crate::preference::{constraint_values, Subregion};
use crate::problem::Problem;

pub const MAX_HALVINGS: u32 = 60;

/// Armijo backtracking on the worst task decrease.
///
/// Accepts the first `η = step_init · backtrack_factor^k` with
/// `max_m [L_m(θ + ηd) − L_m(θ)] ≤ armijo_c · η · α`. With a region, no
/// constraint may end above `max(its value at θ, +active_eps)`.
pub fn line_search<P: Problem + ?Sized>(
    problem: &P,
    theta: &[f64],
    dir: &DescentDirection,
    region: Option<&Subregion>,
    config: &SolverConfig,
) -> Result<f64> {
    if !(dir.alpha < 0.0) {
        return Err(Error::Stall { halvings: 0 });
    }
    let base = problem.evaluate(theta)?;
    let guard = match region {
        Some(r) => {
            let (q, rr) = constraint_values(&base, r)?;
            Some((r, q.max(config.active_eps), rr.max(config.active_eps)))
        }
        None => None,
    };

    let mut step = config.step_init;
    for _ in 0..=MAX_HALVINGS {
        let trial = linalg::add_scaled(theta, step, &dir.d);
        if let Ok(losses) = problem.evaluate(&trial) {
            let worst = losses
                .iter()
                .zip(base.iter())
                .map(|(new, old)| new - old)
                .fold(f64::NEG_INFINITY, f64::max);
            let sufficient = worst <= config.armijo_c * step * dir.alpha;
            let feasible = match guard {
                Some((r, cap_q, cap_r)) => match constraint_values(&losses, r) {
                    Ok((q, rr)) => q <= cap_q && rr <= cap_r,
                    Err(_) => false,
                },
                None => true,
            };
            if sufficient && feasible {
                return Ok(step);
            }
        }
        step *= config.backtrack_factor;
    }
    Err(Error::Stall { halvings: MAX_HALVINGS })
}
