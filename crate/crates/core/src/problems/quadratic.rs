use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::linalg;
use crate::moo::ObjectiveVector;
use crate::problem::Problem;
use crate::problems::ParetoCurve;

/// `L_m(θ) = ‖θ − c_m‖² / n + o_m`: isotropic bowls with Hessian `(2/n) I`.
///
/// With two tasks and zero offsets the Pareto set is the segment `[c_1, c_2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    centers: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    init_scale: f64,
}

impl QuadraticProblem {
    pub const DEFAULT_INIT_SCALE: f64 = 0.05;

    pub fn new(centers: Vec<Vec<f64>>) -> Result<Self> {
        if centers.len() < 2 {
            return Err(Error::InvalidArgument("need at least two task centers".into()));
        }
        let n = centers[0].len();
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for c in &centers {
            Error::check_len(n, c.len())?;
            if !linalg::all_finite(c) {
                return Err(Error::NonFinite("task center"));
            }
        }
        let m = centers.len();
        Ok(Self { centers, offsets: vec![0.0; m], init_scale: Self::DEFAULT_INIT_SCALE })
    }

    /// Two tasks centred at `±(1, …, 1)`.
    pub fn symmetric(dim: usize) -> Result<Self> {
        let a = vec![1.0; dim];
        let b = vec![-1.0; dim];
        Self::new(vec![a, b])
    }

    /// Adds a constant `o_m ≥ 0` to each loss, shifting the front.
    pub fn with_offsets(mut self, offsets: Vec<f64>) -> Result<Self> {
        Error::check_len(self.centers.len(), offsets.len())?;
        if offsets.iter().any(|o| !(o.is_finite() && *o >= 0.0)) {
            return Err(Error::InvalidArgument("offsets must be finite and non-negative".into()));
        }
        self.offsets = offsets;
        Ok(self)
    }

    /// Half-width of the uniform box initial points are drawn from.
    pub fn with_init_scale(mut self, scale: f64) -> Self {
        self.init_scale = scale;
        self
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        Error::check_len(self.dim(), theta.len())
    }
}

impl Problem for QuadraticProblem {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dim(&self) -> usize {
        self.centers[0].len()
    }

    fn num_tasks(&self) -> usize {
        self.centers.len()
    }

    fn evaluate(&self, theta: &[f64]) -> Result<ObjectiveVector> {
        self.check(theta)?;
        let n = self.dim() as f64;
        let losses = self
            .centers
            .iter()
            .zip(&self.offsets)
            .map(|(c, o)| {
                let d = linalg::distance(theta, c);
                d * d / n + o
            })
            .collect();
        ObjectiveVector::new(losses)
    }

    fn gradient(&self, theta: &[f64], task: usize) -> Result<Vec<f64>> {
        self.check(theta)?;
        let c = self
            .centers
            .get(task)
            .ok_or_else(|| Error::InvalidArgument(format!("task {task} out of range")))?;
        let scale = 2.0 / self.dim() as f64;
        Ok(theta.iter().zip(c).map(|(t, ci)| scale * (t - ci)).collect())
    }

    fn hvp(&self, theta: &[f64], weights: &[f64], v: &[f64]) -> Option<Result<Vec<f64>>> {
        let run = || {
            self.check(theta)?;
            self.check(v)?;
            let total: f64 = weights.iter().sum();
            let scale = 2.0 * total / self.dim() as f64;
            Ok(linalg::scaled(scale, v))
        };
        Some(run())
    }

    fn sample_initial(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.dim())
            .map(|_| rng.gen_range(-self.init_scale..=self.init_scale))
            .collect()
    }
}

impl ParetoCurve for QuadraticProblem {
    fn pareto_set_at(&self, t: f64) -> Option<Vec<f64>> {
        if self.centers.len() != 2 {
            return None;
        }
        let (a, b) = (&self.centers[0], &self.centers[1]);
        Some(a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect())
    }
}
