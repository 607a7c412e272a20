//! The relativistic operator and the forced pendulum residual.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{fmt_full, write_table};
use crate::timescale::{
    check_nodes, delta_derivative, delta_integral, read_columns, GridFunction, TimeScaleGrid,
};

/// Constants of the pendulum equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PendulumParams {
    /// Friction.
    pub a: f64,
    /// Amplitude of the restoring term.
    pub b: f64,
    /// Speed bound of the relativistic operator.
    pub c: f64,
    #[serde(rename = "T")]
    pub period: f64,
}

impl PendulumParams {
    pub fn new(a: f64, b: f64, c: f64, period: f64) -> Result<Self> {
        let p = Self { a, b, c, period };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(Error::InvalidParameter(format!("a = {} must be >= 0", self.a)));
        }
        for (name, v) in [("b", self.b), ("c", self.c), ("T", self.period)] {
            if !ok(v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(())
    }

    pub(crate) fn check_grid(&self, grid: &TimeScaleGrid) -> Result<()> {
        if (grid.period() - self.period).abs() > 1e-12 * self.period {
            return Err(Error::GridMismatch(format!(
                "grid period {} differs from T = {}",
                grid.period(),
                self.period
            )));
        }
        Ok(())
    }
}

/// One term `cos·cos(2πkt/T) + sin·sin(2πkt/T)` of a trigonometric forcing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub k: u32,
    pub cos: f64,
    pub sin: f64,
}

impl SeriesTerm {
    pub fn sine(k: u32, amplitude: f64) -> Self {
        Self {
            k,
            cos: 0.0,
            sin: amplitude,
        }
    }
}

/// Evaluates a trigonometric series on the grid (no mean projection).
pub fn evaluate_series(grid: &Arc<TimeScaleGrid>, terms: &[SeriesTerm]) -> GridFunction {
    let w = 2.0 * std::f64::consts::PI / grid.period();
    GridFunction::from_fn(grid, |t| {
        terms
            .iter()
            .map(|term| {
                let arg = w * term.k as f64 * t;
                term.cos * arg.cos() + term.sin * arg.sin()
            })
            .sum()
    })
}

/// Zero-mean forcing `p0` together with the constant offset `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Forcing {
    p0: GridFunction,
    pub s: f64,
}

impl Forcing {
    /// Projects `p0` onto the zero-mean subspace of its grid.
    pub fn new(p0: GridFunction, s: f64) -> Self {
        Self {
            p0: p0.project_zero_mean(),
            s,
        }
    }

    pub fn zero(grid: &Arc<TimeScaleGrid>, s: f64) -> Self {
        Self {
            p0: GridFunction::zeros(grid),
            s,
        }
    }

    pub fn from_series(grid: &Arc<TimeScaleGrid>, terms: &[SeriesTerm], s: f64) -> Self {
        Self::new(evaluate_series(grid, terms), s)
    }

    pub fn p0(&self) -> &GridFunction {
        &self.p0
    }

    pub fn with_offset(&self, s: f64) -> Self {
        Self {
            p0: self.p0.clone(),
            s,
        }
    }
}

/// `φ(v) = v / √(1 - v²/c²)`.
pub fn phi(v: f64, c: f64) -> Result<f64> {
    if !(v.abs() < c) {
        return Err(Error::SpeedLimit { speed: v.abs(), c });
    }
    Ok(phi_unchecked(v, c))
}

#[inline]
pub(crate) fn phi_unchecked(v: f64, c: f64) -> f64 {
    let r = v / c;
    v / ((1.0 - r) * (1.0 + r)).sqrt()
}

/// `φ⁻¹(y) = y / √(1 + y²/c²)`, defined on all of ℝ with range `(-c, c)`.
#[inline]
pub fn phi_inv(y: f64, c: f64) -> f64 {
    let r = y / c;
    if r.abs() > 1e150 {
        return c.copysign(y);
    }
    y / (1.0 + r * r).sqrt()
}

/// Derivative of [`phi_inv`]: `(1 + y²/c²)^(-3/2)`.
#[inline]
pub(crate) fn phi_inv_prime(y: f64, c: f64) -> f64 {
    let r = y / c;
    (1.0 + r * r).powf(-1.5)
}

/// `Δ`-derivative of `x` with the speed bound enforced at every node.
pub fn checked_slopes(x: &GridFunction, c: f64) -> Result<GridFunction> {
    let xd = delta_derivative(x);
    let speed = xd.norm_inf();
    if !(speed < c) {
        return Err(Error::SpeedLimit { speed, c });
    }
    Ok(xd)
}

/// `(φ(x^Δ))^Δ + a·x^Δ + b·sin x` at every node, given the slopes.
pub(crate) fn pendulum_operator(x: &GridFunction, xd: &GridFunction, params: &PendulumParams) -> GridFunction {
    let c = params.c;
    let v = xd.map(|s| phi_unchecked(s, c));
    let dv = delta_derivative(&v);
    let xs = x.values();
    let sd = xd.values();
    let values = dv
        .values()
        .iter()
        .enumerate()
        .map(|(i, &d)| d + params.a * sd[i] + params.b * xs[i].sin())
        .collect();
    GridFunction::new(Arc::clone(x.grid()), values).expect("same grid")
}

pub(crate) fn residual_with(
    x: &GridFunction,
    xd: &GridFunction,
    params: &PendulumParams,
    p0: &GridFunction,
    s: f64,
) -> GridFunction {
    pendulum_operator(x, xd, params).zip_with(p0, |lhs, p| lhs - p - s)
}

/// `𝒫x - p0 - s` nodewise.
pub fn pendulum_residual(
    x: &GridFunction,
    params: &PendulumParams,
    forcing: &Forcing,
) -> Result<GridFunction> {
    if !x.same_grid(forcing.p0()) {
        return Err(Error::GridMismatch("solution and forcing grids differ".into()));
    }
    let xd = checked_slopes(x, params.c)?;
    Ok(residual_with(x, &xd, params, forcing.p0(), forcing.s))
}

/// `s(x) = (b/T) ∫ sin x Δt`, clamped to `[-b, b]` against rounding.
pub fn s_functional(x: &GridFunction, b: f64) -> f64 {
    let integral = delta_integral(&x.map(f64::sin));
    (b * integral / x.grid().period()).clamp(-b, b)
}

/// The two constant solutions `arcsin(s/b)` and `π - arcsin(s/b)`.
pub fn equilibria(s: f64, b: f64) -> Option<(f64, f64)> {
    if s.abs() > b {
        return None;
    }
    let principal = (s / b).asin();
    Some((principal, std::f64::consts::PI - principal))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerUpperReport {
    pub is_valid: bool,
    pub is_strict: bool,
    /// Minimum signed slack over the nodes.
    pub margin: f64,
}

/// Checks the lower (`(φ(α^Δ))^Δ ≥ f`) or upper (`≤ f`) solution inequality.
pub fn check_lower_upper(
    candidate: &GridFunction,
    which: Bound,
    params: &PendulumParams,
    forcing: &Forcing,
) -> Result<LowerUpperReport> {
    let r = pendulum_residual(candidate, params, forcing)?;
    let sign = match which {
        Bound::Lower => 1.0,
        Bound::Upper => -1.0,
    };
    let margin = r
        .values()
        .iter()
        .map(|&v| sign * v)
        .fold(f64::INFINITY, f64::min);
    Ok(LowerUpperReport {
        is_valid: margin >= 0.0,
        is_strict: margin > 0.0,
        margin,
    })
}

/// A periodic solution certified by its residual.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSolution {
    pub x: GridFunction,
    pub xdelta: GridFunction,
    /// The offset the residual was evaluated with.
    pub s: f64,
    pub s_of_x: f64,
    pub residual: GridFunction,
    pub residual_norm: f64,
}

impl PeriodicSolution {
    /// Evaluates slopes, `s(x)` and the residual of `x` for offset `s`.
    pub fn certify(x: GridFunction, params: &PendulumParams, p0: &GridFunction, s: f64) -> Result<Self> {
        let forcing = Forcing {
            p0: p0.clone(),
            s,
        };
        let xdelta = checked_slopes(&x, params.c)?;
        let residual = residual_with(&x, &xdelta, params, forcing.p0(), s);
        Ok(Self {
            s_of_x: s_functional(&x, params.b),
            residual_norm: residual.norm_inf(),
            x,
            xdelta,
            s,
            residual,
        })
    }

    pub fn grid(&self) -> &Arc<TimeScaleGrid> {
        self.x.grid()
    }

    /// `x + 2πk`; residual and slopes are unchanged.
    pub fn shifted(&self, turns: i64) -> Self {
        let mut out = self.clone();
        out.x = self.x.add_scalar(2.0 * std::f64::consts::PI * turns as f64);
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let nodes = self.grid().nodes();
        write_table(
            out,
            &["t", "x", "xdelta", "residual"],
            (0..nodes.len()).map(|i| {
                vec![
                    fmt_full(nodes[i]),
                    fmt_full(self.x.values()[i]),
                    fmt_full(self.xdelta.values()[i]),
                    fmt_full(self.residual.values()[i]),
                ]
            }),
        )
    }
}

/// Reads the `x` column of a solution table (`t,x,...`) or a plain
/// `t,value` table.
pub fn read_solution_csv<R: Read>(grid: &Arc<TimeScaleGrid>, mut input: R) -> Result<GridFunction> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let header = text.lines().next().unwrap_or("");
    let column = if header.split(',').any(|h| h.trim() == "x") {
        "x"
    } else {
        "value"
    };
    let columns = read_columns(text.as_bytes(), &["t", column])?;
    check_nodes(grid, &columns[0])?;
    GridFunction::new(Arc::clone(grid), columns[1].clone())
}
