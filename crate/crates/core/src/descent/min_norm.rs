//! Minimum-norm point of the convex hull of a few vectors.
//!
//! Frank-Wolfe over the simplex of hull weights with pairwise steps: each
//! iteration moves mass from the support vertex with the largest `v_i · p` to
//! the vertex with the smallest, using the exact minimizer along that edge.
//! Two vectors are solved in a single step. Every [`POLISH_EVERY`] iterations
//! the weights are polished by exact minimization over the affine hull of the
//! current support, which fixes the slow tail when the optimum is interior.

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormSolution {
    /// Convex weights on the input vectors.
    pub weights: Vec<f64>,
    /// `Σ w_i v_i`.
    pub point: Vec<f64>,
    /// Final Frank-Wolfe gap `‖p‖² − min_i v_i · p`.
    pub gap: f64,
    pub iterations: usize,
    /// False when the iteration cap was reached before the gap tolerance.
    pub converged: bool,
}

impl MinNormSolution {
    pub fn norm(&self) -> f64 {
        linalg::norm(&self.point)
    }
}

const POLISH_EVERY: usize = 25;

/// Minimizer of `wᵀGw` subject to `Σ w = 1` over the indices in `support`,
/// or `None` when the system is numerically singular.
fn affine_minimizer(gram: &[Vec<f64>], support: &[usize], scale: f64) -> Option<Vec<f64>> {
    let s = support.len();
    let n = s + 1;
    let mut a = vec![vec![0.0; n + 1]; n];
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[r][c] = gram[i][j];
        }
        a[r][s] = 1.0;
        a[s][r] = 1.0;
    }
    a[s][n] = 1.0;
    let tiny = 1e-13 * scale.max(1.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() <= tiny {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    Some((0..s).map(|r| a[r][n] / a[r][r]).collect())
}

/// Wolfe minor cycles: move toward the affine-hull minimizer of the support,
/// dropping the first vertex whose weight would turn negative.
fn polish(gram: &[Vec<f64>], weights: &mut [f64], scale: f64) {
    loop {
        let support: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
        if support.len() < 2 {
            return;
        }
        let Some(target) = affine_minimizer(gram, &support, scale) else {
            return;
        };
        let mut t = 1.0;
        let mut blocking = None;
        for (r, &i) in support.iter().enumerate() {
            if target[r] < 0.0 {
                let ti = weights[i] / (weights[i] - target[r]);
                if ti < t {
                    t = ti;
                    blocking = Some(i);
                }
            }
        }
        for (r, &i) in support.iter().enumerate() {
            weights[i] = (weights[i] + t * (target[r] - weights[i])).max(0.0);
        }
        match blocking {
            Some(i) => weights[i] = 0.0,
            None => return,
        }
    }
}

fn quadratic_form(gram: &[Vec<f64>], w: &[f64]) -> f64 {
    (0..w.len()).map(|i| w[i] * (0..w.len()).map(|j| gram[i][j] * w[j]).sum::<f64>()).sum()
}

fn argmin_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Solves `min ‖Σ w_i v_i‖` over the probability simplex.
///
/// The gap test is relative to `‖p‖²` (capped at the absolute `tol`) so the
/// returned norm stays accurate when the minimum is near zero.
pub fn min_norm_in_hull(vectors: &[Vec<f64>], tol: f64, max_iters: usize) -> Result<MinNormSolution> {
    let Some(first) = vectors.first() else {
        return Err(Error::InvalidArgument("min-norm solver needs at least one vector".into()));
    };
    let dim = first.len();
    for v in vectors {
        Error::check_len(dim, v.len())?;
        if !linalg::all_finite(v) {
            return Err(Error::NonFinite("hull vector"));
        }
    }
    let k = vectors.len();
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| linalg::dot(&vectors[i], &vectors[j])).collect())
        .collect();
    let scale = (0..k).map(|i| gram[i][i]).fold(0.0, f64::max);
    let floor = 1e-6 * scale;

    let diag: Vec<f64> = (0..k).map(|i| gram[i][i]).collect();
    let start = argmin_lowest(&diag);
    let mut weights = vec![0.0; k];
    weights[start] = 1.0;

    let products = |w: &[f64]| -> Vec<f64> {
        (0..k).map(|i| (0..k).map(|j| gram[i][j] * w[j]).sum()).collect()
    };

    let mut iterations = 0;
    let mut converged = false;
    let mut gap;
    let mut polished_at = 0;
    loop {
        if iterations > polished_at && (iterations % POLISH_EVERY == 0 || iterations >= max_iters) {
            polished_at = iterations;
            let mut trial = weights.clone();
            polish(&gram, &mut trial, scale);
            let total: f64 = trial.iter().sum();
            if total > 0.0 {
                trial.iter_mut().for_each(|w| *w /= total);
                if quadratic_form(&gram, &trial) < quadratic_form(&gram, &weights) {
                    weights = trial;
                }
            }
        }
        let g = products(&weights);
        let pp: f64 = weights.iter().zip(&g).map(|(w, gi)| w * gi).sum();
        let to = argmin_lowest(&g);
        gap = pp - g[to];
        if gap <= tol * pp.max(floor).min(1.0) {
            converged = true;
            break;
        }
        if iterations >= max_iters {
            break;
        }
        // Away vertex: largest product among the support, lowest index on ties.
        let mut from = usize::MAX;
        for i in 0..k {
            if weights[i] > 0.0 && (from == usize::MAX || g[i] > g[from]) {
                from = i;
            }
        }
        let curvature = gram[to][to] - 2.0 * gram[to][from] + gram[from][from];
        if from == to || curvature <= 0.0 {
            break;
        }
        let step = ((g[from] - g[to]) / curvature).clamp(0.0, weights[from]);
        if step <= 0.0 {
            break;
        }
        weights[to] += step;
        if step >= weights[from] {
            weights[from] = 0.0;
        } else {
            weights[from] -= step;
        }
        iterations += 1;
    }

    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let point = linalg::combine(&weights, vectors);
    Ok(MinNormSolution { weights, point, gap, iterations, converged })
}
