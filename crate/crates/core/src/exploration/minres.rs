//! MINRES for symmetric, possibly indefinite, operators given only as
//! matrix-vector products. Starts from `x = 0`; one product per iteration.

use crate::error::Result;
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct MinresOutcome {
    pub x: Vec<f64>,
    /// Recurrence estimate of `‖b − A x‖`.
    pub residual_estimate: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Stops when the residual estimate falls below `tol · ‖b‖`, the Lanczos
/// process breaks down, or `max_iters` is reached.
pub fn minres<F>(mut apply: F, b: &[f64], tol: f64, max_iters: usize) -> Result<MinresOutcome>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = b.len();
    let beta1 = linalg::norm(b);
    let mut x = vec![0.0; n];
    if beta1 == 0.0 {
        return Ok(MinresOutcome { x, residual_estimate: 0.0, iterations: 0, converged: true });
    }

    let mut v_prev = vec![0.0; n];
    let mut v = linalg::scaled(1.0 / beta1, b);
    let mut beta = beta1;
    let (mut w, mut w_prev) = (vec![0.0; n], vec![0.0; n]);
    let (mut cs, mut sn) = (-1.0_f64, 0.0_f64);
    let (mut dbar, mut epsln) = (0.0_f64, 0.0_f64);
    let mut phibar = beta1;
    let target = tol * beta1;

    for k in 1..=max_iters {
        let mut p = apply(&v)?;
        linalg::axpy(-beta, &v_prev, &mut p);
        let alpha = linalg::dot(&v, &p);
        linalg::axpy(-alpha, &v, &mut p);
        let beta_next = linalg::norm(&p);

        let oldeps = epsln;
        let delta = cs * dbar + sn * alpha;
        let gbar = sn * dbar - cs * alpha;
        epsln = sn * beta_next;
        dbar = -cs * beta_next;
        let gamma = gbar.hypot(beta_next).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta_next / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        // w_k = (v_k − ε_k w_{k−2} − δ_k w_{k−1}) / γ_k
        let w_next: Vec<f64> = v
            .iter()
            .zip(&w_prev)
            .zip(&w)
            .map(|((vi, w2), w1)| (vi - oldeps * w2 - delta * w1) / gamma)
            .collect();
        w_prev = std::mem::replace(&mut w, w_next);
        linalg::axpy(phi, &w, &mut x);

        let residual = phibar.abs();
        if residual <= target || beta_next <= f64::EPSILON * beta1 {
            return Ok(MinresOutcome { x, residual_estimate: residual, iterations: k, converged: true });
        }
        v_prev = std::mem::replace(&mut v, linalg::scaled(1.0 / beta_next, &p));
        beta = beta_next;
    }
    Ok(MinresOutcome { x, residual_estimate: phibar.abs(), iterations: max_iters, converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dense(a: &[Vec<f64>]) -> impl FnMut(&[f64]) -> Result<Vec<f64>> + '_ {
        move |v: &[f64]| Ok(a.iter().map(|row| linalg::dot(row, v)).collect())
    }

    #[test]
    fn solves_spd_system() {
        let a = vec![vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]];
        let b = [1.0, 2.0, 3.0];
        let out = minres(dense(&a), &b, 1e-12, 50).unwrap();
        assert!(out.converged);
        let ax: Vec<f64> = a.iter().map(|r| linalg::dot(r, &out.x)).collect();
        for (l, r) in ax.iter().zip(&b) {
            assert_abs_diff_eq!(l, r, epsilon = 1e-10);
        }
    }

    #[test]
    fn solves_indefinite_system() {
        let a = vec![vec![1.0, 2.0, 0.0], vec![2.0, -3.0, 1.0], vec![0.0, 1.0, -1.0]];
        let b = [1.0, -1.0, 0.5];
        let out = minres(dense(&a), &b, 1e-12, 50).unwrap();
        let ax: Vec<f64> = a.iter().map(|r| linalg::dot(r, &out.x)).collect();
        for (l, r) in ax.iter().zip(&b) {
            assert_abs_diff_eq!(l, r, epsilon = 1e-9);
        }
    }

    #[test]
    fn scaled_identity_converges_in_one_iteration() {
        let out = minres(|v: &[f64]| Ok(linalg::scaled(0.2, v)), &[1.0, -2.0, 0.5], 1e-10, 50).unwrap();
        assert_eq!(out.iterations, 1);
        assert_abs_diff_eq!(out.x[1], -10.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let out = minres(|v: &[f64]| Ok(v.to_vec()), &[0.0; 4], 1e-10, 10).unwrap();
        assert_eq!(out.x, vec![0.0; 4]);
        assert_eq!(out.iterations, 0);
    }
}
