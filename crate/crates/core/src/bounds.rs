//! Sufficient conditions for `0 ∈ I(p0)` that hold for every forcing.
//!
//! Everything here depends on the dimensionless products `cT` and `ck`,
//! where `k` is a constant in `‖x - x̄‖∞ ≤ k‖x^Δ‖∞`. With
//! `ψ(δ) = 2δ cos δ + (cT - 2δ) cos(ck)` the condition is
//! `max_{0<δ<π/2} ψ(δ) ≥ 0`, and the maximizer is the root `δ*` of
//! `cos δ - δ sin δ = cos(ck)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{fmt_full, fmt_short, write_table};
use crate::relativistic::PendulumParams;
use crate::timescale::TimeScaleGrid;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KMethod {
    /// `k = T/2`, valid on every time scale.
    Universal,
    /// `k = T/(2√3)`, valid on `ℝ`.
    SobolevContinuous,
    /// The optimal constant of the discrete grid, by linear programming.
    ExactDiscrete,
}

impl KMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            KMethod::Universal => "universal",
            KMethod::SobolevContinuous => "sobolev_continuous",
            KMethod::ExactDiscrete => "exact_discrete",
        }
    }

    /// `k / T` for the closed-form rules.
    fn ratio(self) -> Option<f64> {
        match self {
            KMethod::Universal => Some(0.5),
            KMethod::SobolevContinuous => Some(1.0 / (2.0 * SQRT_3)),
            KMethod::ExactDiscrete => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KConstant {
    pub value: f64,
    pub method: KMethod,
}

pub fn k_constant(grid: &TimeScaleGrid, method: KMethod) -> Result<KConstant> {
    let value = match method {
        KMethod::Universal => 0.5 * grid.period(),
        KMethod::SobolevContinuous => {
            if !grid.is_continuous() {
                return Err(Error::MethodUnavailable(format!(
                    "sobolev_continuous needs a continuous time scale, got {}",
                    grid.kind().as_str()
                )));
            }
            grid.period() / (2.0 * SQRT_3)
        }
        KMethod::ExactDiscrete => exact_discrete_k(grid.graininess()),
    };
    Ok(KConstant { value, method })
}

/// `max ‖x - x̄‖∞` over periodic grid functions with `|x^Δ| ≤ 1`.
///
/// For a target node `j`, `x_j - x̄ = Σ_l w_l d_l` in the increments
/// `d_l = x_{l+1} - x_l`, with `w_l = [l < j] - (1/T) Σ_{i>l} μ_i`. The
/// constraints `|d_l| ≤ μ_l`, `Σ d_l = 0` make this a continuous knapsack:
/// start from `d = -μ` and raise increments in decreasing order of `w`
/// until the raised mass reaches `T`.
fn exact_discrete_k(mu: &[f64]) -> f64 {
    let n = mu.len();
    let period: f64 = mu.iter().sum();
    let mut tail = vec![0.0; n];
    for l in (0..n.saturating_sub(1)).rev() {
        tail[l] = tail[l + 1] + mu[l + 1];
    }
    let mut best: f64 = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    for j in 0..n {
        let w: Vec<f64> = (0..n)
            .map(|l| if l < j { 1.0 } else { 0.0 } - tail[l] / period)
            .collect();
        order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
        let mut objective: f64 = -(0..n).map(|l| mu[l] * w[l]).sum::<f64>();
        let mut budget = period;
        for &l in &order {
            if budget <= 0.0 {
                break;
            }
            let raise = (2.0 * mu[l]).min(budget);
            objective += raise * w[l];
            budget -= raise;
        }
        best = best.max(objective);
    }
    best
}

/// `ψ(δ) = 2δ cos δ + (cT - 2δ) cos(ck)`.
pub fn psi(delta: f64, ct: f64, ck: f64) -> Result<f64> {
    check_ck(ck)?;
    if !(delta > 0.0 && delta < FRAC_PI_2) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    Ok(psi_unchecked(delta, ct, ck))
}

fn psi_unchecked(delta: f64, ct: f64, ck: f64) -> f64 {
    2.0 * delta * delta.cos() + (ct - 2.0 * delta) * ck.cos()
}

fn check_ck(ck: f64) -> Result<()> {
    if !(ck > 0.0 && ck < PI) {
        return Err(Error::PreconditionCk {
            ck,
            range: "(0, pi)",
        });
    }
    Ok(())
}

/// The maximizer of `ψ` on `(0, π/2)`: the unique root of
/// `cos δ - δ sin δ = cos(ck)`.
///
/// Bisection; the left side decreases strictly from 1 to `-π/2`, so a root
/// exists for every `ck ∈ (0, π)`. Iterates until the bracket is narrower
/// than `tol` and the equation residual is below `1e-13`.
pub fn delta_star(ck: f64, tol: f64) -> Result<f64> {
    check_ck(ck)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let target = ck.cos();
    let g = |d: f64| d.cos() - d * d.sin() - target;
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let value = g(mid);
        if hi - lo <= tol && value.abs() <= 1e-13 {
            break;
        }
        if value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Root tolerance on `δ*`.
pub const DELTA_TOL: f64 = 1e-8;

/// `(δ*, ψ(δ*))` via the closed form `2δ*² sin δ* + cT cos(ck)`.
pub fn psi_max(ct: f64, ck: f64) -> Result<(f64, f64)> {
    let d = delta_star(ck, DELTA_TOL)?;
    Ok((d, 2.0 * d * d * d.sin() + ct * ck.cos()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// `ck ≤ π/2`.
    Simple,
    /// `π/2 < ck < π`, decided by the sign of `max ψ`.
    Psi,
    /// `ck ≥ π`: no conclusion either way.
    Inapplicable,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Simple => "simple",
            Criterion::Psi => "psi",
            Criterion::Inapplicable => "inapplicable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub ck: f64,
    pub ct: f64,
    pub delta_star: Option<f64>,
    pub psi_max: Option<f64>,
    pub condition_holds: bool,
    pub strict: bool,
    /// `ck - π/2` when `ck > π/2`.
    pub a_angle: Option<f64>,
    pub criterion: Criterion,
}

impl BoundReport {
    pub fn summary(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), fmt_short);
        format!(
            "criterion = \"{}\"\nck = {}\ncT = {}\ndelta_star = {}\npsi_max = {}\nA = {}\ncondition_holds = {}\nstrict = {}\n",
            self.criterion.as_str(),
            fmt_short(self.ck),
            fmt_short(self.ct),
            opt(self.delta_star),
            opt(self.psi_max),
            opt(self.a_angle),
            self.condition_holds,
            self.strict
        )
    }
}

/// Decides whether the sufficient condition for `0 ∈ I(p0)` holds.
pub fn check_zero_in_interval(params: &PendulumParams, k: &KConstant) -> Result<BoundReport> {
    params.validate()?;
    let ck = params.c * k.value;
    let ct = params.c * params.period;
    if ck >= PI {
        return Ok(BoundReport {
            ck,
            ct,
            delta_star: None,
            psi_max: None,
            condition_holds: false,
            strict: false,
            a_angle: Some(ck - FRAC_PI_2),
            criterion: Criterion::Inapplicable,
        });
    }
    let (d, value) = psi_max(ct, ck)?;
    let simple = ck <= FRAC_PI_2;
    Ok(BoundReport {
        ck,
        ct,
        delta_star: Some(d),
        psi_max: Some(value),
        condition_holds: simple || value >= 0.0,
        strict: value > 0.0,
        a_angle: (ck > FRAC_PI_2).then_some(ck - FRAC_PI_2),
        criterion: if simple { Criterion::Simple } else { Criterion::Psi },
    })
}

/// Closed-form rule for `k` used by the critical-period computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KRule {
    Universal,
    SobolevContinuous,
}

impl KRule {
    pub fn as_str(self) -> &'static str {
        self.method().as_str()
    }

    pub fn method(self) -> KMethod {
        match self {
            KRule::Universal => KMethod::Universal,
            KRule::SobolevContinuous => KMethod::SobolevContinuous,
        }
    }

    /// `ck` as a function of `cT`.
    pub fn ck(self, ct: f64) -> f64 {
        ct * self.method().ratio().expect("closed-form rule")
    }

    /// The `cT` range on which `ck < π`, with `cT = π` as left end.
    pub fn ct_bracket(self) -> (f64, f64) {
        match self {
            KRule::Universal => (PI, 2.0 * PI),
            KRule::SobolevContinuous => (PI, 2.0 * SQRT_3 * PI),
        }
    }
}

/// `Ψ(δ, T)` with `k` taken from `rule`, in terms of `cT`.
pub fn psi_two_param(delta: f64, ct: f64, rule: KRule) -> Result<f64> {
    psi(delta, ct, rule.ck(ct))
}

/// `max_δ Ψ(δ, T)` as a function of `cT`.
pub fn psi_max_for_rule(ct: f64, rule: KRule) -> Result<f64> {
    Ok(psi_max(ct, rule.ck(ct))?.1)
}

/// The critical period `T*`: the root in `T` of `max_δ Ψ(δ, T) = 0`.
///
/// Bisection in `cT` over the rule's bracket, run to machine precision so
/// that `cT*` does not depend on `c`; `tol` bounds the returned `T*`.
pub fn t_star(rule: KRule, c: f64, tol: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("c = {c} must be > 0")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let (lo0, hi0) = rule.ct_bracket();
    let f = |ct: f64| psi_max_for_rule(ct, rule);
    let (mut lo, mut hi) = (lo0, hi0 * (1.0 - 1e-12));
    if !(f(lo)? > 0.0 && f(hi)? < 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    debug_assert!((hi - lo) / c <= tol);
    Ok(0.5 * (lo + hi) / c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiCurve {
    pub ct: f64,
    pub ck: f64,
    pub points: Vec<(f64, f64)>,
}

impl PsiCurve {
    pub fn max(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_table(
            out,
            &["delta", "psi"],
            self.points.iter().map(|&(d, p)| vec![fmt_full(d), fmt_full(p)]),
        )
    }
}

/// `ψ` sampled at `δ_j = (π/2)·j/(samples + 1)`, `j = 1..=samples`.
pub fn psi_curve(ct: f64, ck: f64, samples: usize) -> Result<PsiCurve> {
    check_ck(ck)?;
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("samples = {samples} must be >= 2")));
    }
    let step = FRAC_PI_2 / (samples + 1) as f64;
    let points = (1..=samples)
        .map(|j| {
            let d = step * j as f64;
            (d, psi_unchecked(d, ct, ck))
        })
        .collect();
    Ok(PsiCurve { ct, ck, points })
}
