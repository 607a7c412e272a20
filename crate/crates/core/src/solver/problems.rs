use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relativistic::{
    checked_slopes, phi_inv, phi_unchecked, s_functional, PendulumParams, PeriodicSolution,
};
use crate::solver::newton::damped_newton;
use crate::solver::operators::{k_operator, nemitskii_with};
use crate::solver::{SolverConfig, Strategy};
use crate::timescale::{delta_derivative, mean, GridFunction, TimeScaleGrid};

/// Outcome of one integro-differential Dirichlet solve `x(0) = x(T) = r`.
#[derive(Clone, Debug)]
pub struct DirichletSolve {
    pub r: f64,
    /// Periodic extension, with `s = s(x)`.
    pub solution: PeriodicSolution,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Copy)]
enum Mode {
    /// `x₀ = r`, `s = s(x)`; unknowns `v₀..v_{N-1}`.
    Dirichlet { r: f64 },
    /// fixed `s`; unknowns `x₀, v₀..v_{N-1}`.
    Periodic { s: f64 },
}

/// The discrete equations in φ-slope coordinates `vᵢ = φ(x^Δ(tᵢ))`, so the
/// speed bound holds for every unknown vector.
struct NodeSystem<'a> {
    grid: &'a TimeScaleGrid,
    params: &'a PendulumParams,
    p0: &'a [f64],
    mode: Mode,
}

impl NodeSystem<'_> {
    fn offset(&self) -> usize {
        match self.mode {
            Mode::Dirichlet { .. } => 0,
            Mode::Periodic { .. } => 1,
        }
    }

    /// Node values, slopes and the closure defect `x_N - x_0`.
    fn trajectory(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let n = self.grid.len();
        let mu = self.grid.graininess();
        let c = self.params.c;
        let (x0, v) = match self.mode {
            Mode::Dirichlet { r } => (r, u),
            Mode::Periodic { .. } => (u[0], &u[1..]),
        };
        let slopes: Vec<f64> = v.iter().map(|&y| phi_inv(y, c)).collect();
        let mut x = Vec::with_capacity(n);
        let mut acc = x0;
        let mut closure = 0.0;
        for i in 0..n {
            x.push(acc);
            acc += mu[i] * slopes[i];
            closure += mu[i] * slopes[i];
        }
        (x, slopes, closure)
    }

    fn equations(&self, u: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let mu = self.grid.graininess();
        let v = &u[self.offset()..];
        let (x, slopes, closure) = self.trajectory(u);
        let s = match self.mode {
            Mode::Periodic { s } => s,
            Mode::Dirichlet { .. } => {
                let integral: f64 = mu.iter().zip(&x).map(|(m, xi)| m * xi.sin()).sum();
                self.params.b * integral / self.grid.period()
            }
        };
        let rows = match self.mode {
            // the last node's equation follows from the others when s = s(x)
            Mode::Dirichlet { .. } => n - 1,
            Mode::Periodic { .. } => n,
        };
        let mut out = Vec::with_capacity(rows + 1);
        for i in 0..rows {
            let dv = (v[(i + 1) % n] - v[i]) / mu[i];
            out.push(dv + self.params.a * slopes[i] + self.params.b * x[i].sin() - self.p0[i] - s);
        }
        out.push(closure / self.grid.period());
        out
    }

    fn unknowns_from(&self, seed: &GridFunction) -> Vec<f64> {
        let c = self.params.c;
        let slopes = delta_derivative(seed);
        let limit = 0.999 * c;
        let mut u: Vec<f64> = Vec::with_capacity(seed.len() + 1);
        if let Mode::Periodic { .. } = self.mode {
            u.push(seed.values()[0]);
        }
        u.extend(slopes.values().iter().map(|&s| phi_unchecked(s.clamp(-limit, limit), c)));
        u
    }

    fn state(&self, u: &[f64], grid: &Arc<TimeScaleGrid>) -> GridFunction {
        GridFunction::new(Arc::clone(grid), self.trajectory(u).0).expect("node count")
    }
}

fn check_inputs(params: &PendulumParams, p0: &GridFunction, seed: &GridFunction, cfg: &SolverConfig) -> Result<()> {
    params.validate()?;
    cfg.validate()?;
    params.check_grid(p0.grid())?;
    if !seed.same_grid(p0) {
        return Err(Error::GridMismatch("seed and forcing grids differ".into()));
    }
    Ok(())
}

/// Dirichlet solve seeded from the constant function `r`.
pub fn solve_dirichlet(r: f64, params: &PendulumParams, p0: &GridFunction, cfg: &SolverConfig) -> Result<DirichletSolve> {
    let seed = GridFunction::constant(p0.grid(), r);
    solve_dirichlet_from(r, params, p0, &seed, cfg)
}

/// Solves `(φ(x^Δ))^Δ + a x^Δ + b sin x = p0 + s(x)` with `x(0) = x(T) = r`.
///
/// `p0` is projected onto the zero-mean subspace first. Only the shape of
/// `seed` matters; its value at `t₀` is replaced by `r`. Non-convergence is
/// reported through [`DirichletSolve::converged`] with the best iterate.
pub fn solve_dirichlet_from(
    r: f64,
    params: &PendulumParams,
    p0: &GridFunction,
    seed: &GridFunction,
    cfg: &SolverConfig,
) -> Result<DirichletSolve> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("boundary value r = {r}")));
    }
    check_inputs(params, p0, seed, cfg)?;
    let p0 = p0.project_zero_mean();
    let grid = p0.grid();

    let (x, iterations) = match cfg.strategy {
        Strategy::Newton => {
            let system = NodeSystem {
                grid,
                params,
                p0: p0.values(),
                mode: Mode::Dirichlet { r },
            };
            let out = damped_newton(
                system.unknowns_from(seed),
                |u| system.equations(u),
                1e-3 * cfg.residual_tol,
                cfg.max_iterations,
            );
            (system.state(&out.u, grid), out.iterations)
        }
        Strategy::PicardMf => picard_dirichlet(r, params, &p0, seed, cfg)?,
    };
    let s = s_functional(&x, params.b);
    let solution = PeriodicSolution::certify(x, params, &p0, s)?;
    Ok(DirichletSolve {
        r,
        converged: solution.residual_norm <= cfg.residual_tol,
        solution,
        iterations,
    })
}

fn picard_dirichlet(
    r: f64,
    params: &PendulumParams,
    p0: &GridFunction,
    seed: &GridFunction,
    cfg: &SolverConfig,
) -> Result<(GridFunction, usize)> {
    let mut x = seed.add_scalar(r - seed.values()[0]);
    let mut xd = checked_slopes(&x, params.c)?;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        let s = s_functional(&x, params.b);
        let residual = crate::relativistic::residual_with(&x, &xd, params, p0, s).norm_inf();
        if residual <= cfg.residual_tol {
            break;
        }
        iterations += 1;
        let n = nemitskii_with(&x, &xd, params, p0, s);
        let y = k_operator(&n.add_scalar(-mean(&n)), params.c, cfg)?;
        let pinned = y.add_scalar(r - y.values()[0]);
        x = x.zip_with(&pinned, |old, new| old + cfg.relaxation * (new - old));
        xd = checked_slopes(&x, params.c)?;
    }
    Ok((x, iterations))
}

/// Solves the periodic problem for a fixed offset `s`, starting from `seed`.
pub fn solve_periodic(
    s: f64,
    params: &PendulumParams,
    p0: &GridFunction,
    seed: &GridFunction,
    cfg: &SolverConfig,
) -> Result<PeriodicSolution> {
    check_inputs(params, p0, seed, cfg)?;
    let p0 = p0.project_zero_mean();
    let grid = p0.grid();

    let (x, iterations) = match cfg.strategy {
        Strategy::Newton => {
            let system = NodeSystem {
                grid,
                params,
                p0: p0.values(),
                mode: Mode::Periodic { s },
            };
            let out = damped_newton(
                system.unknowns_from(seed),
                |u| system.equations(u),
                1e-3 * cfg.residual_tol,
                cfg.max_iterations,
            );
            (system.state(&out.u, grid), out.iterations)
        }
        Strategy::PicardMf => picard_periodic(s, params, &p0, seed, cfg)?,
    };
    let solution = PeriodicSolution::certify(x, params, &p0, s)?;
    if solution.residual_norm <= cfg.residual_tol && solution.residual_norm.is_finite() {
        Ok(solution)
    } else {
        Err(Error::NotConverged {
            iterations,
            residual: solution.residual_norm,
            best: Box::new(solution),
        })
    }
}

fn picard_periodic(
    s: f64,
    params: &PendulumParams,
    p0: &GridFunction,
    seed: &GridFunction,
    cfg: &SolverConfig,
) -> Result<(GridFunction, usize)> {
    let mut x = seed.clone();
    let mut xd = checked_slopes(&x, params.c)?;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        let residual = crate::relativistic::residual_with(&x, &xd, params, p0, s).norm_inf();
        if residual <= cfg.residual_tol || !residual.is_finite() {
            break;
        }
        iterations += 1;
        let n = nemitskii_with(&x, &xd, params, p0, s);
        let n_bar = mean(&n);
        let image = k_operator(&n.add_scalar(-n_bar), params.c, cfg)?.add_scalar(mean(&x) + n_bar);
        x = x.zip_with(&image, |old, new| old + cfg.relaxation * (new - old));
        xd = checked_slopes(&x, params.c)?;
    }
    Ok((x, iterations))
}
