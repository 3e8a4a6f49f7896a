//! Two-task regression network with a shared tanh hidden layer.
//!
//! Parameter layout (flat, in order):
//!
//! | block        | size               |
//! |--------------|--------------------|
//! | shared `W`   | `hidden × input`   |
//! | shared `b`   | `hidden`           |
//! | head 1 `w,c` | `hidden + 1`       |
//! | head 2 `w,c` | `hidden + 1`       |
//!
//! Task `m` predicts `w_m · tanh(W x + b) + c_m` and is scored by mean squared
//! error against a fixed random teacher network.

use std::ops::Range;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::moo::ObjectiveVector;
use crate::problem::Problem;

const TASKS: usize = 2;
const TEACHER_HIDDEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpShape {
    pub input: usize,
    pub hidden: usize,
    pub samples: usize,
    pub data_seed: u64,
}

impl Default for MlpShape {
    fn default() -> Self {
        Self { input: 8, hidden: 16, samples: 256, data_seed: 7 }
    }
}

#[derive(Debug, Clone)]
pub struct ToyMlpProblem {
    shape: MlpShape,
    inputs: Vec<Vec<f64>>,
    targets: [Vec<f64>; TASKS],
}

struct Teacher {
    w: Vec<Vec<f64>>,
    b: Vec<f64>,
    a: Vec<f64>,
}

impl Teacher {
    fn random(input: usize, rng: &mut impl Rng) -> Self {
        let s = (3.0 / input as f64).sqrt();
        let w = (0..TEACHER_HIDDEN)
            .map(|_| (0..input).map(|_| rng.gen_range(-s..=s)).collect())
            .collect();
        let b = (0..TEACHER_HIDDEN).map(|_| rng.gen_range(-0.5..=0.5)).collect();
        let a = (0..TEACHER_HIDDEN).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Self { w, b, a }
    }

    fn predict(&self, x: &[f64]) -> f64 {
        self.w
            .iter()
            .zip(&self.b)
            .zip(&self.a)
            .map(|((w, b), a)| a * (linalg::dot(w, x) + b).tanh())
            .sum()
    }
}

impl ToyMlpProblem {
    pub fn new(shape: MlpShape) -> Result<Self> {
        if shape.input == 0 || shape.hidden == 0 || shape.samples == 0 {
            return Err(Error::InvalidArgument("network sizes must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(shape.data_seed);
        let inputs: Vec<Vec<f64>> = (0..shape.samples)
            .map(|_| (0..shape.input).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .collect();
        let teachers = [Teacher::random(shape.input, &mut rng), Teacher::random(shape.input, &mut rng)];
        let targets = teachers.map(|t| inputs.iter().map(|x| t.predict(x)).collect());
        Ok(Self { shape, inputs, targets })
    }

    pub fn shape(&self) -> MlpShape {
        self.shape
    }

    pub fn shared_len(&self) -> usize {
        self.shape.hidden * (self.shape.input + 1)
    }

    /// Index range of task `m`'s head inside the flat vector.
    pub fn head_range(&self, task: usize) -> Range<usize> {
        let start = self.shared_len() + task * (self.shape.hidden + 1);
        start..start + self.shape.hidden + 1
    }

    fn hidden(&self, theta: &[f64], x: &[f64]) -> Vec<f64> {
        let (input, hidden) = (self.shape.input, self.shape.hidden);
        let weights = &theta[..hidden * input];
        let bias = &theta[hidden * input..hidden * (input + 1)];
        (0..hidden)
            .map(|j| (linalg::dot(&weights[j * input..(j + 1) * input], x) + bias[j]).tanh())
            .collect()
    }

    fn head_output(&self, theta: &[f64], task: usize, h: &[f64]) -> f64 {
        let head = &theta[self.head_range(task)];
        linalg::dot(&head[..self.shape.hidden], h) + head[self.shape.hidden]
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        Error::check_len(self.dim(), theta.len())
    }
}

impl Problem for ToyMlpProblem {
    fn name(&self) -> &str {
        "mlp"
    }

    fn dim(&self) -> usize {
        self.shared_len() + TASKS * (self.shape.hidden + 1)
    }

    fn num_tasks(&self) -> usize {
        TASKS
    }

    fn evaluate(&self, theta: &[f64]) -> Result<ObjectiveVector> {
        self.check(theta)?;
        let mut sums = [0.0; TASKS];
        for (i, x) in self.inputs.iter().enumerate() {
            let h = self.hidden(theta, x);
            for (task, sum) in sums.iter_mut().enumerate() {
                let e = self.head_output(theta, task, &h) - self.targets[task][i];
                *sum += e * e;
            }
        }
        let n = self.shape.samples as f64;
        ObjectiveVector::new(sums.iter().map(|s| s / n).collect())
    }

    fn gradient(&self, theta: &[f64], task: usize) -> Result<Vec<f64>> {
        self.check(theta)?;
        if task >= TASKS {
            return Err(Error::InvalidArgument(format!("task {task} out of range")));
        }
        let (input, hidden) = (self.shape.input, self.shape.hidden);
        let n = self.shape.samples as f64;
        let head = self.head_range(task);
        let head_w = &theta[head.start..head.start + hidden];
        let mut grad = vec![0.0; self.dim()];
        for (i, x) in self.inputs.iter().enumerate() {
            let h = self.hidden(theta, x);
            let err = 2.0 * (self.head_output(theta, task, &h) - self.targets[task][i]) / n;
            for j in 0..hidden {
                grad[head.start + j] += err * h[j];
                let pre = err * head_w[j] * (1.0 - h[j] * h[j]);
                let row = &mut grad[j * input..(j + 1) * input];
                linalg::axpy(pre, x, row);
                grad[hidden * input + j] += pre;
            }
            grad[head.end - 1] += err;
        }
        Ok(grad)
    }

    fn sample_initial(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let (input, hidden) = (self.shape.input, self.shape.hidden);
        let s_in = 1.0 / (input as f64).sqrt();
        let s_hid = 1.0 / (hidden as f64).sqrt();
        let mut theta = Vec::with_capacity(self.dim());
        theta.extend((0..hidden * input).map(|_| rng.gen_range(-s_in..=s_in)));
        theta.extend((0..hidden).map(|_| 0.0));
        for _ in 0..TASKS {
            theta.extend((0..hidden).map(|_| rng.gen_range(-s_hid..=s_hid)));
            theta.push(0.0);
        }
        theta
    }
}
