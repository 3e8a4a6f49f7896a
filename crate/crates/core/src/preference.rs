//! Balance point, preference vectors and the angular subregion constraints.
//!
//! A subregion `i` is the wedge of objective space whose angle lies in
//! `[π_i, π_{i+1}]`. Membership is expressed through two scalar constraints on
//! `c(L) = cos φ(L) = L_1 / ‖(L_1, ‖aux‖)‖`:
//!
//! * `Q_i(L) = c(L) − cos π_i ≤ 0` (not below the lower ray),
//! * `R_i(L) = cos π_{i+1} − c(L) ≤ 0` (not above the upper ray).

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::descent::{descend_to_pareto, ActiveSets};
use crate::error::{Error, Result};
use crate::moo::ParetoPoint;
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferenceVector {
    pub angle: f64,
    pub unit: [f64; 2],
}

impl PreferenceVector {
    pub fn new(angle: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&angle) {
            return Err(Error::InvalidArgument(format!("preference angle {angle} outside [0, π/2]")));
        }
        // cos(π/2) is not exactly zero in floating point; the upper ray of the
        // last region must contain L_1 = 0.
        let unit = if angle == FRAC_PI_2 { [0.0, 1.0] } else { [angle.cos(), angle.sin()] };
        Ok(Self { angle, unit })
    }

    pub fn cos(&self) -> f64 {
        self.unit[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subregion {
    pub index: usize,
    pub lo: PreferenceVector,
    pub hi: PreferenceVector,
}

impl Subregion {
    pub fn new(index: usize, lo: PreferenceVector, hi: PreferenceVector) -> Result<Self> {
        if !(lo.angle < hi.angle && hi.angle <= FRAC_PI_2) {
            return Err(Error::Degenerate(format!(
                "subregion [{}, {}] is empty or exceeds π/2",
                lo.angle, hi.angle
            )));
        }
        Ok(Self { index, lo, hi })
    }

    /// Builds the `K` consecutive regions spanned by `vectors` (length `K + 1`).
    pub fn from_preferences(vectors: &[PreferenceVector]) -> Result<Vec<Self>> {
        vectors
            .windows(2)
            .enumerate()
            .map(|(i, w)| Self::new(i, w[0], w[1]))
            .collect()
    }

    pub fn contains_angle(&self, angle: f64, tol: f64) -> bool {
        angle >= self.lo.angle - tol && angle <= self.hi.angle + tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceResult {
    pub point: ParetoPoint,
    pub pi0: f64,
    pub u0: PreferenceVector,
}

/// Unconstrained descent from `theta0`; the angle of the converged losses
/// anchors the preference wedge.
pub fn find_balance_point<P: Problem + ?Sized>(
    problem: &P,
    theta0: &[f64],
    config: &SolverConfig,
) -> Result<BalanceResult> {
    let point = descend_to_pareto(problem, theta0, None, config)?;
    let pi0 = point.angle;
    let u0 = PreferenceVector::new(pi0)?;
    Ok(BalanceResult { point, pi0, u0 })
}

/// `π_i = π_0 + (i/K)(π/2 − π_0)` for `i = 0…K`.
pub fn make_preference_vectors(pi0: f64, k: usize) -> Result<Vec<PreferenceVector>> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one subregion".into()));
    }
    if !(pi0 >= 0.0) {
        return Err(Error::InvalidArgument(format!("pi0 = {pi0} is negative")));
    }
    if pi0 >= FRAC_PI_2 {
        return Err(Error::Degenerate(format!("pi0 = {pi0} leaves no room below π/2")));
    }
    let span = FRAC_PI_2 - pi0;
    (0..=k)
        .map(|i| {
            let angle = if i == k { FRAC_PI_2 } else { pi0 + (i as f64 / k as f64) * span };
            PreferenceVector::new(angle)
        })
        .collect()
}

/// `cos φ(L)` computed without trigonometry.
pub fn cos_angle(losses: &[f64]) -> Result<f64> {
    let main = losses[0];
    let aux = crate::linalg::norm(&losses[1..]);
    let r = main.hypot(aux);
    if r == 0.0 {
        return Err(Error::Degenerate("all losses are zero".into()));
    }
    Ok(main / r)
}

/// `(Q_i, R_i)` at `losses`; both non-positive iff the angle is inside the region.
pub fn constraint_values(losses: &[f64], region: &Subregion) -> Result<(f64, f64)> {
    let c = cos_angle(losses)?;
    Ok((c - region.lo.cos(), region.hi.cos() - c))
}

/// Partial derivatives of `cos φ` with respect to each loss.
pub(crate) fn cos_angle_partials(losses: &[f64]) -> Result<Vec<f64>> {
    let main = losses[0];
    let aux = crate::linalg::norm(&losses[1..]);
    let r2 = main * main + aux * aux;
    if r2 == 0.0 {
        return Err(Error::Degenerate("all losses are zero".into()));
    }
    let r3 = r2 * r2.sqrt();
    let mut partials = Vec::with_capacity(losses.len());
    partials.push(aux * aux / r3);
    partials.extend(losses[1..].iter().map(|l| -main * l / r3));
    Ok(partials)
}

/// `∇_θ cos φ(L(θ))` from precomputed losses and task gradients.
pub(crate) fn cos_angle_gradient(losses: &[f64], grads: &[Vec<f64>]) -> Result<Vec<f64>> {
    let partials = cos_angle_partials(losses)?;
    Ok(crate::linalg::combine(&partials, grads))
}

/// Gradients of `Q_i` and `R_i` with respect to the parameters.
pub fn constraint_gradients<P: Problem + ?Sized>(
    problem: &P,
    theta: &[f64],
    _region: &Subregion,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let losses = problem.evaluate(theta)?;
    let grads = problem.gradients(theta)?;
    let grad_q = cos_angle_gradient(&losses, &grads)?;
    let grad_r = grad_q.iter().map(|v| -v).collect();
    Ok((grad_q, grad_r))
}

/// Constraints within `eps` of violation, or violated. A ray at angle `0` or
/// `π/2` bounds the whole non-negative quadrant and is never activated.
pub fn activated_sets(losses: &[f64], region: &Subregion, eps: f64) -> Result<ActiveSets> {
    let (q, r) = constraint_values(losses, region)?;
    let mut sets = ActiveSets::default();
    if q >= -eps && region.lo.angle > 0.0 {
        sets.q_active.insert(region.index);
    }
    if r >= -eps && region.hi.angle < FRAC_PI_2 {
        sets.r_active.insert(region.index);
    }
    Ok(sets)
}

/// Index of the region whose wedge holds `losses`; boundary angles go to the
/// lower index.
pub fn region_of(losses: &[f64], regions: &[Subregion]) -> Result<Option<usize>> {
    for region in regions {
        let (q, r) = constraint_values(losses, region)?;
        if q <= 0.0 && r <= 0.0 {
            return Ok(Some(region.index));
        }
    }
    Ok(None)
}

impl ActiveSets {
    pub fn is_empty(&self) -> bool {
        self.q_active.is_empty() && self.r_active.is_empty()
    }
}
