//! Domain types and objective-space primitives.
//!
//! Task index 0 is always the main task; every other index is auxiliary.

use std::f64::consts::FRAC_PI_2;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Flat parameter vector holding shared and task-specific coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if !linalg::all_finite(&values) {
            return Err(Error::NonFinite("parameter vector"));
        }
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ParameterVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Per-task loss values `(L_1, …, L_M)`; all finite and non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(losses: Vec<f64>) -> Result<Self> {
        if !linalg::all_finite(&losses) {
            return Err(Error::NonFinite("objective vector"));
        }
        if let Some(bad) = losses.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidArgument(format!("negative loss {bad}")));
        }
        Ok(Self(losses))
    }

    pub fn main(&self) -> f64 {
        self.0[0]
    }

    /// Euclidean norm of the auxiliary block `(L_2, …, L_M)`.
    pub fn aux_norm(&self) -> f64 {
        linalg::norm(&self.0[1..])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for ObjectiveVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ObjectiveVector> for Vec<f64> {
    fn from(v: ObjectiveVector) -> Self {
        v.0
    }
}

/// A converged solution together with its first-order certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub theta: ParameterVector,
    pub losses: ObjectiveVector,
    /// Convex weights `λ` with `Σ λ_m ∇L_m(θ) ≈ 0`.
    pub kkt_weights: Vec<f64>,
    pub stationarity: f64,
    /// Objective angle of `losses`, in `[0, π/2]`.
    pub angle: f64,
    pub region_index: Option<usize>,
    pub iters_used: usize,
}

/// Points found inside one subregion, in discovery order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoSet {
    pub region_index: usize,
    pub points: Vec<ParetoPoint>,
}

impl ParetoSet {
    pub fn new(region_index: usize) -> Self {
        Self { region_index, points: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when `losses` is at least `delta` away from every stored point.
    pub fn is_novel(&self, losses: &[f64], delta: f64) -> bool {
        self.points
            .iter()
            .all(|p| linalg::distance(&p.losses, losses) >= delta)
    }

    pub fn push(&mut self, point: ParetoPoint) {
        self.points.push(point);
    }
}

/// `a` dominates `b`: no component worse and the vectors differ.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    Error::check_len(a.len(), b.len())?;
    if !linalg::all_finite(a) || !linalg::all_finite(b) {
        return Err(Error::NonFinite("objective vector"));
    }
    let no_worse = a.iter().zip(b).all(|(x, y)| x <= y);
    Ok(no_worse && a != b)
}

/// Ratio of the main loss to the summed auxiliary losses.
pub fn rho(losses: &[f64]) -> Result<f64> {
    if losses.len() < 2 {
        return Err(Error::InvalidArgument("rho needs at least two tasks".into()));
    }
    let aux: f64 = losses[1..].iter().sum();
    if aux <= 0.0 {
        return Err(Error::Degenerate("auxiliary losses sum to zero".into()));
    }
    Ok(losses[0] / aux)
}

/// Angle between the main-loss axis and `L`, measured in the plane spanned by
/// `L_1` and the auxiliary norm: `atan2(‖(L_2,…,L_M)‖, L_1)`.
pub fn objective_angle(losses: &[f64]) -> Result<f64> {
    if losses.len() < 2 {
        return Err(Error::InvalidArgument("angle needs at least two tasks".into()));
    }
    if !linalg::all_finite(losses) {
        return Err(Error::NonFinite("objective vector"));
    }
    let main = losses[0];
    let aux = linalg::norm(&losses[1..]);
    if main == 0.0 && aux == 0.0 {
        return Err(Error::Degenerate("all losses are zero".into()));
    }
    Ok(aux.atan2(main).clamp(0.0, FRAC_PI_2))
}
