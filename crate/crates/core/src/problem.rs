use rand::RngCore;

use crate::error::Result;
use crate::linalg;
use crate::moo::ObjectiveVector;

/// A differentiable vector-valued loss over a flat parameter vector.
///
/// Implementations must be pure functions of `theta`: evaluation may happen
/// concurrently from several threads.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn num_tasks(&self) -> usize;

    fn evaluate(&self, theta: &[f64]) -> Result<ObjectiveVector>;

    /// `∇L_task(θ)`, with task 0 the main task.
    fn gradient(&self, theta: &[f64], task: usize) -> Result<Vec<f64>>;

    /// Exact `Σ_m λ_m ∇²L_m(θ) v` when the problem can supply it.
    fn hvp(&self, _theta: &[f64], _weights: &[f64], _v: &[f64]) -> Option<Result<Vec<f64>>> {
        None
    }

    /// Draws a random starting point.
    fn sample_initial(&self, rng: &mut dyn RngCore) -> Vec<f64>;

    /// Gradients of every task, stacked by task index.
    fn gradients(&self, theta: &[f64]) -> Result<Vec<Vec<f64>>> {
        (0..self.num_tasks()).map(|m| self.gradient(theta, m)).collect()
    }

    /// `Σ_m w_m ∇L_m(θ)`.
    fn weighted_gradient(&self, theta: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
        let grads = self.gradients(theta)?;
        Ok(linalg::combine(weights, &grads))
    }
}

impl<P: Problem + ?Sized> Problem for &P {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn num_tasks(&self) -> usize {
        (**self).num_tasks()
    }
    fn evaluate(&self, theta: &[f64]) -> Result<ObjectiveVector> {
        (**self).evaluate(theta)
    }
    fn gradient(&self, theta: &[f64], task: usize) -> Result<Vec<f64>> {
        (**self).gradient(theta, task)
    }
    fn hvp(&self, theta: &[f64], weights: &[f64], v: &[f64]) -> Option<Result<Vec<f64>>> {
        (**self).hvp(theta, weights, v)
    }
    fn sample_initial(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (**self).sample_initial(rng)
    }
}

impl<P: Problem + ?Sized> Problem for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn num_tasks(&self) -> usize {
        (**self).num_tasks()
    }
    fn evaluate(&self, theta: &[f64]) -> Result<ObjectiveVector> {
        (**self).evaluate(theta)
    }
    fn gradient(&self, theta: &[f64], task: usize) -> Result<Vec<f64>> {
        (**self).gradient(theta, task)
    }
    fn hvp(&self, theta: &[f64], weights: &[f64], v: &[f64]) -> Option<Result<Vec<f64>>> {
        (**self).hvp(theta, weights, v)
    }
    fn sample_initial(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (**self).sample_initial(rng)
    }
}
