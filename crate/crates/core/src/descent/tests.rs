use std::f64::consts::FRAC_PI_2;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::moo::ObjectiveVector;
use crate::preference::{constraint_values, PreferenceVector, Subregion};
use crate::problems::QuadraticProblem;

/// Exhaustive simplex grid with `divisions` steps per axis, returning the
/// smallest hull-point norm found.
pub(crate) fn grid_min_norm(vectors: &[Vec<f64>], divisions: usize) -> f64 {
    let k = vectors.len();
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| linalg::dot(&vectors[i], &vectors[j])).collect())
        .collect();
    let mut best = f64::INFINITY;
    let mut w = vec![0usize; k];
    fn recurse(depth: usize, left: usize, w: &mut [usize], gram: &[Vec<f64>], n: usize, best: &mut f64) {
        let k = w.len();
        if depth == k - 1 {
            w[depth] = left;
            let scale = 1.0 / n as f64;
            let mut f = 0.0;
            for i in 0..k {
                for j in 0..k {
                    f += gram[i][j] * w[i] as f64 * w[j] as f64;
                }
            }
            *best = best.min(f * scale * scale);
            return;
        }
        for take in 0..=left {
            w[depth] = take;
            recurse(depth + 1, left - take, w, gram, n, best);
        }
    }
    recurse(0, divisions, &mut w, &gram, divisions, &mut best);
    best.max(0.0).sqrt()
}

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

/// Gradients (1,0) and (0,1) at θ = 0.
fn unit_gradient_problem() -> QuadraticProblem {
    // ∇L_m = 2(θ − c_m)/n with n = 2 ⇒ c_1 = (−1, 0), c_2 = (0, −1).
    QuadraticProblem::new(vec![vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap()
}

#[test]
fn mgda_on_orthogonal_unit_gradients() {
    let dir = mgda_direction(&unit_gradient_problem(), &[0.0, 0.0], &cfg()).unwrap();
    assert_abs_diff_eq!(dir.d[0], -0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(dir.d[1], -0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(dir.alpha, -0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(dir.multipliers.total(), 1.0, epsilon = 1e-12);
}

#[test]
fn mgda_vanishes_on_pareto_segment() {
    let p = QuadraticProblem::symmetric(6).unwrap();
    let mid = vec![0.3; 6];
    let dir = mgda_direction(&p, &mid, &cfg()).unwrap();
    assert!(dir.norm() <= 1e-8);
    assert!(dir.alpha.abs() <= 1e-8);
    assert!(stationarity_measure(&p, &[1.0; 6], &cfg()).unwrap() <= 1e-8);
    assert!(stationarity_measure(&p, &[0.0; 6], &cfg()).unwrap() <= 1e-8);
}

#[test]
fn stationarity_off_segment_matches_grid_oracle() {
    let p = QuadraticProblem::symmetric(3).unwrap();
    let theta = [0.4, -0.2, 0.9];
    let s = stationarity_measure(&p, &theta, &cfg()).unwrap();
    let oracle = grid_min_norm(&p.gradients(&theta).unwrap(), 100_000);
    assert!(s > 0.1);
    assert_abs_diff_eq!(s, oracle, epsilon = 1e-6);
}

#[test]
fn constrained_direction_without_active_constraints_is_mgda() {
    let p = QuadraticProblem::symmetric(4).unwrap();
    let theta = [0.2, 0.1, -0.3, 0.05];
    let losses = p.evaluate(&theta).unwrap();
    let phi = crate::moo::objective_angle(&losses).unwrap();
    let region = Subregion::new(
        0,
        PreferenceVector::new(phi - 0.2).unwrap(),
        PreferenceVector::new(phi + 0.2).unwrap(),
    )
    .unwrap();
    let free = mgda_direction(&p, &theta, &cfg()).unwrap();
    let con = constrained_direction(&p, &theta, &region, &cfg()).unwrap();
    assert!(con.active.is_empty());
    assert_eq!(free.d, con.d);
    assert_eq!(free.alpha, con.alpha);
}

#[test]
fn active_ray_constraint_shortens_direction() {
    // Pin a region ray at the current angle on the side the free MGDA step
    // would cross; the active constraint must then shrink the step.
    let p = QuadraticProblem::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let theta = [-0.5, -1.5];
    let losses = p.evaluate(&theta).unwrap();
    let phi = crate::moo::objective_angle(&losses).unwrap();
    let free = mgda_direction(&p, &theta, &cfg()).unwrap();
    let moved = p.evaluate(&linalg::add_scaled(&theta, 1e-4, &free.d)).unwrap();
    let rising = crate::moo::objective_angle(&moved).unwrap() > phi;
    let region = if rising {
        Subregion::new(0, PreferenceVector::new(0.0).unwrap(), PreferenceVector::new(phi).unwrap())
    } else {
        Subregion::new(0, PreferenceVector::new(phi).unwrap(), PreferenceVector::new(FRAC_PI_2).unwrap())
    }
    .unwrap();
    let con = constrained_direction(&p, &theta, &region, &cfg()).unwrap();
    let (grad_q, grad_r) = crate::preference::constraint_gradients(&p, &theta, &region).unwrap();
    let grad_c = if rising {
        assert_eq!(con.active.r_active.len(), 1);
        grad_r
    } else {
        assert_eq!(con.active.q_active.len(), 1);
        grad_q
    };
    assert!(linalg::dot(&grad_c, &free.d) > 0.0, "unconstrained step must violate the ray");
    assert!(con.norm() < free.norm());

    let mut vectors = p.gradients(&theta).unwrap();
    vectors.push(grad_c);
    let oracle = grid_min_norm(&vectors, 2000);
    assert_abs_diff_eq!(con.norm(), oracle, epsilon = 1e-4);
    for v in &vectors {
        assert!(linalg::dot(v, &con.d) <= con.alpha + 1e-8);
    }
    assert_abs_diff_eq!(con.multipliers.total(), 1.0, epsilon = 1e-9);
}

#[test]
fn line_search_accepts_full_small_step_on_quadratic() {
    // For L = ‖θ−c‖²/n the change along d is η∇L·d + η²‖d‖²/n, so Armijo
    // holds at η whenever η‖d‖²/n ≤ (1−c)|∇L·d|.
    let p = QuadraticProblem::symmetric(5).unwrap();
    let theta = [0.5, -0.3, 0.8, 0.1, -0.9];
    let dir = mgda_direction(&p, &theta, &cfg()).unwrap();
    let config = SolverConfig { step_init: 0.1, ..cfg() };
    assert_eq!(line_search(&p, &theta, &dir, None, &config).unwrap(), 0.1);
}

#[test]
fn line_search_on_single_task_steepest_descent() {
    let p = QuadraticProblem::symmetric(3).unwrap();
    let theta = [2.0, 0.5, -1.0];
    let g = p.gradient(&theta, 0).unwrap();
    let d: Vec<f64> = g.iter().map(|v| -v).collect();
    let alpha = -linalg::dot(&g, &g);
    let dir = DescentDirection { d: d.clone(), alpha, multipliers: Multipliers::default(), active: ActiveSets::default(), approximate: false };
    let single = crate::problems::QuadraticProblem::new(vec![p.centers()[0].clone(), p.centers()[0].clone()]).unwrap();
    let config = SolverConfig { armijo_c: 0.1, ..cfg() };
    let step = line_search(&single, &theta, &dir, None, &config).unwrap();
    let before = single.evaluate(&theta).unwrap()[0];
    let after = single.evaluate(&linalg::add_scaled(&theta, step, &d)).unwrap()[0];
    assert!(after < before);
}

#[test]
fn line_search_stalls_on_fake_descent() {
    let p = QuadraticProblem::symmetric(3).unwrap();
    let theta = [0.1, 0.2, 0.3];
    // Points uphill for both tasks while claiming a tiny negative slope.
    let uphill = linalg::scaled(1e-3, &linalg::sub(&theta, &[0.0, 0.0, -5.0]));
    let dir = DescentDirection {
        d: uphill,
        alpha: -1e-15,
        multipliers: Multipliers::default(),
        active: ActiveSets::default(),
        approximate: false,
    };
    assert!(matches!(line_search(&p, &theta, &dir, None, &cfg()), Err(Error::Stall { .. })));
    let flat = DescentDirection { alpha: 0.0, ..dir };
    assert!(matches!(line_search(&p, &theta, &flat, None, &cfg()), Err(Error::Stall { .. })));
}

/// Euclidean distance from `theta` to the segment `[a, b]`.
pub(crate) fn distance_to_segment(theta: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = linalg::sub(b, a);
    let t = (linalg::dot(&linalg::sub(theta, a), &ab) / linalg::dot(&ab, &ab)).clamp(0.0, 1.0);
    linalg::distance(theta, &linalg::add_scaled(a, t, &ab))
}

#[test]
fn descent_lands_on_analytic_segment() {
    let p = QuadraticProblem::symmetric(10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let theta0: Vec<f64> = (0..10).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let point = descend_to_pareto(&p, &theta0, None, &cfg()).unwrap();
        let c = p.centers();
        assert!(distance_to_segment(&point.theta, &c[0], &c[1]) <= 1e-4);
        assert!(point.stationarity <= cfg().stationarity_tol);
        assert_abs_diff_eq!(point.kkt_weights.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
    }
}

#[test]
fn descent_from_stationary_point_takes_no_steps() {
    let p = QuadraticProblem::symmetric(4).unwrap();
    let point = descend_to_pareto(&p, &[0.25; 4], None, &cfg()).unwrap();
    assert_eq!(point.iters_used, 0);
    assert_eq!(point.region_index, None);
}

#[test]
fn region_descent_respects_constraints() {
    let p = QuadraticProblem::symmetric(10).unwrap();
    let prefs = crate::preference::make_preference_vectors(std::f64::consts::FRAC_PI_4, 5).unwrap();
    let regions = Subregion::from_preferences(&prefs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for region in &regions {
        let theta0 = p.sample_initial(&mut rng);
        let point = descend_to_pareto(&p, &theta0, Some(region), &cfg()).unwrap();
        let (q, r) = constraint_values(&point.losses, region).unwrap();
        assert!(q <= cfg().active_eps && r <= cfg().active_eps, "region {}: q={q} r={r}", region.index);
        assert_eq!(point.region_index, Some(region.index));
    }
}

#[test]
fn deep_interior_pareto_point_is_stationary_in_region() {
    let p = QuadraticProblem::symmetric(4).unwrap();
    let theta = vec![0.0; 4];
    let region = Subregion::new(0, PreferenceVector::new(0.5).unwrap(), PreferenceVector::new(1.1).unwrap()).unwrap();
    let dir = constrained_direction(&p, &theta, &region, &cfg()).unwrap();
    assert!(dir.norm() <= cfg().stationarity_tol);
}

#[test]
fn non_convergence_carries_best_iterate() {
    let p = QuadraticProblem::symmetric(4).unwrap();
    let config = SolverConfig { max_iters: 2, ..cfg() };
    match descend_to_pareto(&p, &[3.0, -2.0, 1.0, 0.5], None, &config) {
        Err(Error::NonConvergence { iters, best, .. }) => {
            assert_eq!(iters, 2);
            assert_eq!(best.iters_used, 2);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn rejects_bad_start() {
    let p = QuadraticProblem::symmetric(2).unwrap();
    assert!(matches!(descend_to_pareto(&p, &[f64::NAN, 0.0], None, &cfg()), Err(Error::NonFinite(_))));
    assert!(matches!(descend_to_pareto(&p, &[0.0], None, &cfg()), Err(Error::Dimension { .. })));
}

fn random_vectors(max_k: usize, max_dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_k, 1..=max_dim).prop_flat_map(|(k, d)| {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn min_norm_matches_grid_oracle(vectors in random_vectors(3, 5)) {
        let sol = min_norm_in_hull(&vectors, 1e-9, 500).unwrap();
        let oracle = grid_min_norm(&vectors, 1000);
        prop_assert!(sol.norm() <= oracle + 1e-9);
        prop_assert!(oracle - sol.norm() <= 1e-3);
        prop_assert!((sol.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(sol.weights.iter().all(|w| *w >= 0.0));
        let pp = linalg::dot(&sol.point, &sol.point);
        for v in &vectors {
            prop_assert!(linalg::dot(v, &sol.point) >= pp - 1e-9);
        }
    }

    #[test]
    fn direction_slope_bounds_hold(seed in any::<u64>(), dim in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers: Vec<Vec<f64>> = (0..3).map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let p = QuadraticProblem::new(centers).unwrap();
        let theta: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let dir = mgda_direction(&p, &theta, &cfg()).unwrap();
        let dn = dir.norm();
        prop_assert!(dir.alpha <= -0.5 * dn * dn + 1e-8);
        for g in p.gradients(&theta).unwrap() {
            prop_assert!(linalg::dot(&g, &dir.d) <= dir.alpha + 1e-12);
        }
    }

    #[test]
    fn accepted_steps_never_raise_a_loss(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = QuadraticProblem::symmetric(4).unwrap();
        let theta: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let dir = mgda_direction(&p, &theta, &cfg()).unwrap();
        prop_assume!(dir.norm() > 1e-6);
        let step = line_search(&p, &theta, &dir, None, &cfg()).unwrap();
        let before: ObjectiveVector = p.evaluate(&theta).unwrap();
        let after = p.evaluate(&linalg::add_scaled(&theta, step, &dir.d)).unwrap();
        for (a, b) in after.iter().zip(before.iter()) {
            prop_assert!(a - b <= cfg().armijo_c * step * dir.alpha);
        }
    }
}
