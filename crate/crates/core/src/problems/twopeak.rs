use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::linalg;
use crate::moo::ObjectiveVector;
use crate::problem::Problem;
use crate::problems::ParetoCurve;

/// `L_1 = 1 − exp(−‖θ − v‖²)`, `L_2 = 1 − exp(−‖θ + v‖²)` with
/// `v = (1, …, 1)/√n`. Nonconvex, losses in `[0, 1)`, Pareto set `{t v : |t| ≤ 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPeakProblem {
    peak: Vec<f64>,
    init_scale: f64,
}

impl TwoPeakProblem {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let s = 1.0 / (dim as f64).sqrt();
        Ok(Self { peak: vec![s; dim], init_scale: 0.05 })
    }

    pub fn with_init_scale(mut self, scale: f64) -> Self {
        self.init_scale = scale;
        self
    }

    pub fn peak(&self) -> &[f64] {
        &self.peak
    }

    /// `u = θ − s·v` and `‖u‖²` for task sign `s`.
    fn offset(&self, theta: &[f64], task: usize) -> Result<(Vec<f64>, f64)> {
        Error::check_len(self.peak.len(), theta.len())?;
        let sign = match task {
            0 => 1.0,
            1 => -1.0,
            _ => return Err(Error::InvalidArgument(format!("task {task} out of range"))),
        };
        let u: Vec<f64> = theta.iter().zip(&self.peak).map(|(t, p)| t - sign * p).collect();
        let r2 = linalg::dot(&u, &u);
        Ok((u, r2))
    }
}

impl Problem for TwoPeakProblem {
    fn name(&self) -> &str {
        "twopeak"
    }

    fn dim(&self) -> usize {
        self.peak.len()
    }

    fn num_tasks(&self) -> usize {
        2
    }

    fn evaluate(&self, theta: &[f64]) -> Result<ObjectiveVector> {
        let (_, r1) = self.offset(theta, 0)?;
        let (_, r2) = self.offset(theta, 1)?;
        // -expm1 keeps precision near the peaks.
        ObjectiveVector::new(vec![-(-r1).exp_m1(), -(-r2).exp_m1()])
    }

    fn gradient(&self, theta: &[f64], task: usize) -> Result<Vec<f64>> {
        let (u, r2) = self.offset(theta, task)?;
        Ok(linalg::scaled(2.0 * (-r2).exp(), &u))
    }

    fn hvp(&self, theta: &[f64], weights: &[f64], v: &[f64]) -> Option<Result<Vec<f64>>> {
        let run = || {
            Error::check_len(self.dim(), v.len())?;
            let mut out = vec![0.0; v.len()];
            for (task, w) in weights.iter().enumerate().take(2) {
                let (u, r2) = self.offset(theta, task)?;
                let e = (-r2).exp();
                // ∇²L = e (2 I − 4 u uᵀ)
                let uv = linalg::dot(&u, v);
                for i in 0..v.len() {
                    out[i] += w * e * (2.0 * v[i] - 4.0 * u[i] * uv);
                }
            }
            Ok(out)
        };
        Some(run())
    }

    fn sample_initial(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.dim())
            .map(|_| rng.gen_range(-self.init_scale..=self.init_scale))
            .collect()
    }
}

impl ParetoCurve for TwoPeakProblem {
    fn pareto_set_at(&self, t: f64) -> Option<Vec<f64>> {
        Some(linalg::scaled(1.0 - 2.0 * t, &self.peak))
    }
}
