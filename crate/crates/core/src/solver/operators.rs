use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relativistic::{checked_slopes, phi_inv, phi_inv_prime, Forcing, PendulumParams};
use crate::solver::SolverConfig;
use crate::timescale::{cumulative, cumulative_zero_mean, delta_integral, mean, GridFunction, zero_mean_tol};

fn inverse_flux(h: &GridFunction, kappa: f64, c: f64) -> (f64, f64) {
    let mu = h.grid().graininess();
    let mut value = 0.0;
    let mut slope = 0.0;
    for (m, &v) in mu.iter().zip(h.values()) {
        value += m * phi_inv(v + kappa, c);
        slope += m * phi_inv_prime(v + kappa, c);
    }
    (value, slope)
}

/// The constant `κ = c(h)` with `∫₀ᵀ φ⁻¹(h + κ) Δt = 0`.
///
/// Bisection on `[-‖h‖∞ - cT, ‖h‖∞ + cT]`, where the objective is strictly
/// increasing, followed by a few guarded Newton steps.
pub fn solve_c_of_h(h: &GridFunction, c: f64, tol: f64) -> Result<f64> {
    let reach = h.norm_inf() + c * h.grid().period();
    let (mut lo, mut hi) = (-reach, reach);
    let g_lo = inverse_flux(h, lo, c).0;
    let g_hi = inverse_flux(h, hi, c).0;
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }

    let mut kappa = 0.5 * (lo + hi);
    for _ in 0..200 {
        kappa = 0.5 * (lo + hi);
        let g = inverse_flux(h, kappa, c).0;
        if g == 0.0 || g.abs() <= tol * 1e-3 {
            break;
        }
        if g < 0.0 {
            lo = kappa;
        } else {
            hi = kappa;
        }
        if hi - lo <= 4.0 * f64::EPSILON * kappa.abs().max(1.0) {
            break;
        }
    }

    let (mut g, mut dg) = inverse_flux(h, kappa, c);
    for _ in 0..4 {
        if g == 0.0 || dg <= 0.0 {
            break;
        }
        let next = kappa - g / dg;
        if !(next >= lo && next <= hi) {
            break;
        }
        let (gn, dgn) = inverse_flux(h, next, c);
        if gn.abs() >= g.abs() {
            break;
        }
        kappa = next;
        g = gn;
        dg = dgn;
    }
    debug_assert!(g.abs() <= tol.max(1e-13 * h.grid().period() * c));
    Ok(kappa)
}

/// Solves `(φ(x^Δ))^Δ = ξ` on the zero-mean subspace.
pub fn k_operator(xi: &GridFunction, c: f64, cfg: &SolverConfig) -> Result<GridFunction> {
    let integral = delta_integral(xi);
    let tol = zero_mean_tol(xi);
    if integral.abs() > tol {
        return Err(Error::NonZeroMean { integral, tol });
    }
    let big_xi = cumulative(xi, 0.0);
    let kappa = solve_c_of_h(&big_xi, c, cfg.bisection_tol)?;
    let slopes = big_xi.map(|v| phi_inv(v + kappa, c));
    Ok(cumulative_zero_mean(&slopes))
}

/// `t ↦ p0(t) + s - a·x^Δ(t) - b·sin x(t)`.
pub fn nemitskii(x: &GridFunction, params: &PendulumParams, forcing: &Forcing) -> Result<GridFunction> {
    if !x.same_grid(forcing.p0()) {
        return Err(Error::GridMismatch("state and forcing grids differ".into()));
    }
    let xd = checked_slopes(x, params.c)?;
    Ok(nemitskii_with(x, &xd, params, forcing.p0(), forcing.s))
}

pub(crate) fn nemitskii_with(
    x: &GridFunction,
    xd: &GridFunction,
    params: &PendulumParams,
    p0: &GridFunction,
    s: f64,
) -> GridFunction {
    let values = (0..x.len())
        .map(|i| p0.values()[i] + s - params.a * xd.values()[i] - params.b * x.values()[i].sin())
        .collect();
    GridFunction::new(Arc::clone(x.grid()), values).expect("same grid")
}

/// `M_f(x) = x̄ + mean(N_f x) + K(N_f x - mean(N_f x))`.
pub fn mf_operator(
    x: &GridFunction,
    params: &PendulumParams,
    forcing: &Forcing,
    cfg: &SolverConfig,
) -> Result<GridFunction> {
    let n = nemitskii(x, params, forcing)?;
    let n_bar = mean(&n);
    let kx = k_operator(&n.add_scalar(-n_bar), params.c, cfg)?;
    Ok(kx.add_scalar(mean(x) + n_bar))
}
