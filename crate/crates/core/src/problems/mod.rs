//! Bundled test problems, their analytic Pareto fronts, finite-difference
//! gradient checks and the weighted-sum baseline.

mod front;
mod mlp;
mod quadratic;
mod sweep;
mod twopeak;

pub use front::{analytic_front, FrontOracle, ParetoCurve, FRONT_SAMPLES};
pub use mlp::{MlpShape, ToyMlpProblem};
pub use quadratic::QuadraticProblem;
pub use sweep::{scalarization_sweep, two_task_grid, SweepEntry};
pub use twopeak::TwoPeakProblem;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::linalg;
use crate::moo::ObjectiveVector;
use crate::problem::Problem;

/// Central-difference gradient of task `task`.
pub fn finite_diff_gradient<P: Problem + ?Sized>(problem: &P, theta: &[f64], task: usize, eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    let mut probe = theta.to_vec();
    let mut out = Vec::with_capacity(theta.len());
    for j in 0..theta.len() {
        probe[j] = theta[j] + eps;
        let up = problem.evaluate(&probe)?[task];
        probe[j] = theta[j] - eps;
        let down = problem.evaluate(&probe)?[task];
        probe[j] = theta[j];
        out.push((up - down) / (2.0 * eps));
    }
    Ok(out)
}

/// `‖a − b‖ / max(‖a‖, ‖b‖, floor)`.
pub fn relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff = linalg::distance(a, b);
    diff / linalg::norm(a).max(linalg::norm(b)).max(floor)
}

/// Problems selectable by name from the command line.
#[derive(Debug, Clone)]
pub enum BundledProblem {
    Quadratic(QuadraticProblem),
    TwoPeak(TwoPeakProblem),
    Mlp(ToyMlpProblem),
}

impl BundledProblem {
    pub const NAMES: [&'static str; 3] = ["quadratic", "twopeak", "mlp"];

    /// `size` is the parameter dimension for `quadratic` and `twopeak`, and the
    /// hidden width for `mlp`.
    pub fn by_name(name: &str, size: usize) -> Result<Self> {
        match name {
            "quadratic" => Ok(Self::Quadratic(QuadraticProblem::symmetric(size)?)),
            "twopeak" => Ok(Self::TwoPeak(TwoPeakProblem::new(size)?)),
            "mlp" => Ok(Self::Mlp(ToyMlpProblem::new(MlpShape { hidden: size, ..MlpShape::default() })?)),
            other => Err(Error::InvalidArgument(format!(
                "unknown problem {other:?}; expected one of {}",
                Self::NAMES.join(", ")
            ))),
        }
    }

    fn inner(&self) -> &dyn Problem {
        match self {
            Self::Quadratic(p) => p,
            Self::TwoPeak(p) => p,
            Self::Mlp(p) => p,
        }
    }

    pub fn pareto_curve(&self) -> Option<&dyn ParetoCurve> {
        match self {
            Self::Quadratic(p) if p.num_tasks() == 2 => Some(p),
            Self::TwoPeak(p) => Some(p),
            _ => None,
        }
    }
}

impl Problem for BundledProblem {
    fn name(&self) -> &str {
        self.inner().name()
    }
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn num_tasks(&self) -> usize {
        self.inner().num_tasks()
    }
    fn evaluate(&self, theta: &[f64]) -> Result<ObjectiveVector> {
        self.inner().evaluate(theta)
    }
    fn gradient(&self, theta: &[f64], task: usize) -> Result<Vec<f64>> {
        self.inner().gradient(theta, task)
    }
    fn hvp(&self, theta: &[f64], weights: &[f64], v: &[f64]) -> Option<Result<Vec<f64>>> {
        self.inner().hvp(theta, weights, v)
    }
    fn sample_initial(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.inner().sample_initial(rng)
    }
}
