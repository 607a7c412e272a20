//! Cross-module invariants over randomly generated inputs.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use proptest::prelude::*;

use tspend::bounds::{delta_star, k_constant, psi, psi_max, KMethod, DELTA_TOL};
use tspend::relativistic::{
    pendulum_residual, phi, phi_inv, s_functional, Forcing, PendulumParams, SeriesTerm,
};
use tspend::solver::{k_operator, mf_operator, solve_periodic, SolverConfig};
use tspend::timescale::{
    antiderivative_zero_mean, delta_derivative, delta_integral, mean, GridFunction, TimeScaleGrid,
    TimeScaleSpec,
};

/// A hybrid grid on `[0, 2)`: one or two dense pieces plus scattered points.
fn hybrid_grid() -> impl Strategy<Value = Arc<TimeScaleGrid>> {
    (
        0.05f64..0.6,
        0.1f64..0.4,
        prop::collection::vec(1.45f64..1.95, 0..4),
        5usize..30,
        any::<bool>(),
    )
        .prop_map(|(start, len, points, resolution, second)| {
            let mut intervals = vec![[start, start + len]];
            if second {
                intervals.push([1.2, 1.4]);
            }
            TimeScaleSpec::interval_union(2.0, resolution, intervals, points)
                .build()
                .unwrap()
        })
}

fn values_on(grid: &Arc<TimeScaleGrid>, seed: &[f64]) -> GridFunction {
    GridFunction::from_fn(grid, |t| {
        seed.iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * PI * t + k as f64).sin())
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graininess_sums_to_the_period(grid in hybrid_grid()) {
        let total: f64 = grid.graininess().iter().sum();
        prop_assert!((total - 2.0).abs() < 1e-12);
        prop_assert!(grid.graininess().iter().all(|&m| m > 0.0));
    }

    #[test]
    fn antiderivative_inverts_the_derivative(
        grid in hybrid_grid(),
        seed in prop::collection::vec(-2.0f64..2.0, 1..4),
    ) {
        let f = values_on(&grid, &seed);
        let f = f.add_scalar(-mean(&f));
        let back = antiderivative_zero_mean(&delta_derivative(&f)).unwrap();
        prop_assert!(back.sub(&f).norm_inf() < 1e-11 * (1.0 + f.norm_inf()));
    }

    #[test]
    fn integral_of_a_derivative_vanishes(grid in hybrid_grid(), seed in prop::collection::vec(-2.0f64..2.0, 1..4)) {
        let f = values_on(&grid, &seed);
        prop_assert!(delta_integral(&delta_derivative(&f)).abs() < 1e-12 * (1.0 + f.norm_inf()) * grid.len() as f64);
    }

    #[test]
    fn phi_is_an_increasing_bijection(c in 0.1f64..10.0, u in -0.999f64..0.999, w in -0.999f64..0.999) {
        let (v1, v2) = (u * c, w * c);
        let (y1, y2) = (phi(v1, c).unwrap(), phi(v2, c).unwrap());
        prop_assert!((phi_inv(y1, c) - v1).abs() <= 1e-12 * c);
        if v1 < v2 {
            prop_assert!(y1 < y2);
        }
    }

    #[test]
    fn residual_is_two_pi_periodic_and_s_is_bounded(
        grid in hybrid_grid(),
        seed in prop::collection::vec(-0.05f64..0.05, 1..4),
        level in -10.0f64..10.0,
        b in 0.1f64..3.0,
    ) {
        let params = PendulumParams::new(0.7, b, 1.0, 2.0).unwrap();
        let x = values_on(&grid, &seed).add_scalar(level);
        let forcing = Forcing::from_series(&grid, &[SeriesTerm::sine(1, 0.2)], 0.1);
        let r1 = pendulum_residual(&x, &params, &forcing).unwrap();
        let r2 = pendulum_residual(&x.add_scalar(2.0 * PI), &params, &forcing).unwrap();
        // Shifting by 2π perturbs each difference by an ulp of |x|, and the
        // two Δ-steps divide that by μ².
        let mu = grid.graininess().iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 16.0 * f64::EPSILON * (x.norm_inf() + 2.0 * PI) * (1.0 + 1.0 / (mu * mu));
        prop_assert!(r1.sub(&r2).norm_inf() <= tol);
        prop_assert!(s_functional(&x, b).abs() <= b);
    }

    #[test]
    fn manufactured_forcing_gives_zero_residual_on_discrete_scales(
        n in 3usize..24,
        seed in prop::collection::vec(-0.02f64..0.02, 1..4),
        level in -3.0f64..3.0,
    ) {
        let grid = TimeScaleSpec::uniform_discrete(2.0, n).build().unwrap();
        let params = PendulumParams::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let x = values_on(&grid, &seed).add_scalar(level);
        let zero = Forcing::zero(&grid, 0.0);
        let lhs = pendulum_residual(&x, &params, &zero).unwrap();
        let s = mean(&lhs);
        let forcing = Forcing::new(lhs.clone(), s);
        let r = pendulum_residual(&x, &params, &forcing).unwrap();
        prop_assert!(r.norm_inf() < 1e-12 * (1.0 + lhs.norm_inf()));
    }

    #[test]
    fn k_duality_on_hybrid_grids(grid in hybrid_grid(), seed in prop::collection::vec(-3.0f64..3.0, 1..4), c in 0.3f64..3.0) {
        let xi = values_on(&grid, &seed).project_zero_mean();
        let k = k_operator(&xi, c, &SolverConfig::default()).unwrap();
        let slopes = delta_derivative(&k);
        prop_assert!(slopes.norm_inf() < c);
        let back = delta_derivative(&slopes.map(|v| phi(v, c).unwrap()));
        prop_assert!(back.sub(&xi).norm_inf() < 1e-9 * (1.0 + xi.norm_inf()));
        prop_assert!(mean(&k).abs() < 1e-10);
    }

    #[test]
    fn closed_form_maximum_identity(ck in (FRAC_PI_2 + 1e-6)..(PI - 1e-6), ct in 3.0f64..7.0) {
        let d = delta_star(ck, DELTA_TOL).unwrap();
        let (_, closed) = psi_max(ct, ck).unwrap();
        prop_assert!((psi(d, ct, ck).unwrap() - closed).abs() <= 1e-9);
        for j in 1..50 {
            let other = FRAC_PI_2 * j as f64 / 50.0;
            prop_assert!(psi(other, ct, ck).unwrap() <= closed + 1e-12);
        }
    }

    #[test]
    fn exact_discrete_k_is_at_most_half_the_period(grid in hybrid_grid()) {
        let k = k_constant(&grid, KMethod::ExactDiscrete).unwrap().value;
        prop_assert!(k > 0.0 && k <= grid.period() / 2.0 + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Converged solutions satisfy the speed bound, `|s(x)| ≤ b`, the mean
    /// identity, and are fixed points of `M_f`.
    #[test]
    fn converged_solutions_satisfy_the_invariants(
        grid in hybrid_grid(),
        amp in 0.0f64..0.4,
        s in -0.6f64..0.6,
    ) {
        let params = PendulumParams::new(1.0, 1.0, 2.0, 2.0).unwrap();
        let p0 = Forcing::from_series(&grid, &[SeriesTerm::sine(1, amp)], s);
        let cfg = SolverConfig::default();
        let seed = GridFunction::constant(&grid, s.asin());
        let sol = match solve_periodic(s, &params, p0.p0(), &seed, &cfg) {
            Ok(sol) => sol,
            Err(_) => return Ok(()),
        };
        prop_assert!(sol.xdelta.norm_inf() < params.c);
        prop_assert!(s_functional(&sol.x, params.b).abs() <= params.b);
        prop_assert!((sol.s_of_x - s).abs() < 1e-6);
        let m = mf_operator(&sol.x, &params, &p0, &cfg).unwrap();
        prop_assert!(m.sub(&sol.x).norm_inf() < 1e-6);
    }
}
