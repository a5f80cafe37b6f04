use proptest::prelude::*;

use eikonal_vv::rate_lab::{self, rate_scale, rate_weight};
use eikonal_vv::{eval_p_eps, eval_u_eps, uniform_grid, PotentialProfile, ProblemSpec};

fn arb_potential() -> impl Strategy<Value = PotentialProfile> {
    (prop::collection::vec(0.05f64..0.95, 0..4), prop::collection::vec(0.0f64..2.0, 6)).prop_map(|(mut interior, vals)| {
        interior.sort_by(f64::total_cmp);
        interior.dedup_by(|a, b| (*a - *b).abs() < 1e-2);
        let mut knots = vec![0.0];
        knots.extend(interior);
        knots.push(1.0);
        let values = vals[..knots.len()].to_vec();
        PotentialProfile::piecewise_linear(knots, values).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `p^ε` satisfies `p' + ((n-1)/r + 1/ε) p = -V/ε` away from the knots of `V`.
    #[test]
    fn p_eps_solves_the_radial_ode(v in arb_potential(), n in 1u32..5, log_eps in -2.0f64..0.0, r in 0.05f64..0.95) {
        let eps = 10f64.powf(log_eps);
        prop_assume!(v.knots().iter().all(|k| (k - r).abs() > 1e-3));
        let spec = ProblemSpec::new(v.clone(), n, eps).unwrap();
        let h = 1e-4;
        let p = |x: f64| eval_p_eps(&spec, x).unwrap();
        let dp = (p(r + h) - p(r - h)) / (2.0 * h);
        let residual = dp + ((n as f64 - 1.0) / r + 1.0 / eps) * p(r) + v.value(r) / eps;
        let scale = (v.sup_bound() / eps).max(1.0);
        prop_assert!(residual.abs() <= 1e-5 * scale, "residual {residual:e} at r = {r}");
    }

    /// `p^ε(r) / r → -V(0)/(nε)`: `u^ε(|x|)` is C¹ with zero slope at the origin.
    #[test]
    fn p_eps_vanishes_linearly_at_origin(v in arb_potential(), n in 1u32..6, log_eps in -2.0f64..0.0) {
        let eps = 10f64.powf(log_eps);
        let spec = ProblemSpec::new(v.clone(), n, eps).unwrap();
        prop_assert_eq!(eval_p_eps(&spec, 0.0).unwrap(), 0.0);
        let r = 1e-6 * eps;
        let ratio = eval_p_eps(&spec, r).unwrap() / r;
        let expected = -v.value(0.0) / (n as f64 * eps);
        prop_assert!((ratio - expected).abs() <= 1e-4 * (v.lipschitz() + v.sup_bound()) / eps + 1e-12);
    }

    /// `p^ε ≤ 0`, `|p^ε| ≤ M`, `u^ε` non-increasing with `u^ε(1) = 0`, and
    /// `0 ≤ u^ε(r) ≤ M(1 - r)`.
    #[test]
    fn viscous_solution_signs_and_bounds(v in arb_potential(), n in 1u32..8, log_eps in -3.0f64..0.0) {
        let eps = 10f64.powf(log_eps);
        let sol = eval_u_eps(&ProblemSpec::new(v.clone(), n, eps).unwrap(), &uniform_grid(101)).unwrap();
        let m = v.sup_bound();
        prop_assert!(sol.p_values.iter().all(|&p| p <= 0.0 && -p <= m + 1e-10));
        prop_assert!(sol.u_values.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*sol.u_values.last().unwrap(), 0.0);
        for (r, u) in sol.grid.iter().zip(&sol.u_values) {
            prop_assert!(*u >= 0.0 && *u <= m * (1.0 - r) + 1e-10, "u_eps({r}) = {u}, M = {m}");
        }
    }
}

#[test]
fn errors_fall_monotonically_and_fast_enough() {
    let eps = [1e-1, 1e-2, 1e-3];
    for (v, n) in [(PotentialProfile::vee(0.5).unwrap(), 1), (PotentialProfile::vee(0.3).unwrap(), 3)] {
        let report = rate_lab::run_convergence(&v, n, &eps, 0.1, 501).unwrap();
        for w in report.sup_errors.windows(2) {
            assert!(w[1] * 1.5 <= w[0], "{}: sup errors {:?}", v.label(), report.sup_errors);
        }
        for w in report.uniform_errors.windows(2) {
            assert!(w[1] < w[0]);
        }
    }
}

#[test]
fn fitted_constant_bounds_an_unseen_epsilon() {
    let v = PotentialProfile::vee(0.5).unwrap();
    let report = rate_lab::run_convergence(&v, 2, &[1e-1, 3e-2, 1e-2], 0.1, 501).unwrap();
    let c_hat = report.fitted_constant;
    let eps = 3e-3;
    let grid = uniform_grid(1001);
    let sol = eval_u_eps(&ProblemSpec::new(v, 2, eps).unwrap(), &grid).unwrap();
    for ((&r, u), lim) in grid.iter().zip(&sol.u_values).zip(sol.limit_values()) {
        if r >= 0.1 && r < 1.0 {
            let bound = c_hat * rate_scale(eps) * rate_weight(r);
            assert!((u - lim).abs() <= bound, "r = {r}: error {} > bound {bound}", (u - lim).abs());
        }
    }
}

#[test]
fn zero_point_probe_shrinks_for_smooth_and_kinked_potentials() {
    for v in [PotentialProfile::constant(1.0).unwrap(), PotentialProfile::vee(0.5).unwrap()] {
        let probe = rate_lab::zero_point_probe(&v, 2, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(probe.monotone_decreasing);
        assert_eq!(probe.note, rate_lab::NO_RATE_CLAIMED);
    }
}
