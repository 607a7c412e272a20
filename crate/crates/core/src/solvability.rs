//! Inner estimation of the solvability interval by sweeping the boundary
//! value of the Dirichlet problem, continuity probes in the forcing, and the
//! multi-seed search for geometrically distinct solutions.
//!
//! Every converged Dirichlet solve extends to a periodic solution with offset
//! `s(x)`, so each converged sweep row is a certified member of the interval.
//! The reported endpoints are therefore inner estimates: `[d̂, D̂]` is always
//! contained in the true interval up to the residual tolerance.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{fmt_full, fmt_short, write_table};
use crate::relativistic::{PendulumParams, PeriodicSolution};
use crate::solver::{solve_dirichlet, solve_dirichlet_from, solve_periodic, SolverConfig};
use crate::timescale::{delta_integral, mean, GridFunction, TimeScaleGrid, zero_mean_tol};

/// Geometric-distinctness tolerance in the sup norm, after the best `2πk` shift.
pub const CLUSTER_TOL: f64 = 1e-3 * 2.0 * PI;

pub const MIN_R_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSeed {
    Constant,
    /// Seeded from the solution of the row with this index.
    Neighbor(usize),
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub r: f64,
    pub s_of_x: f64,
    pub residual: f64,
    pub converged: bool,
    pub seed: RowSeed,
    pub solution: PeriodicSolution,
}

#[derive(Clone, Debug)]
pub struct SolvabilityEstimate {
    /// `d̂(p0)`, the smallest certified offset.
    pub lower_hat: f64,
    /// `D̂(p0)`, the largest certified offset.
    pub upper_hat: f64,
    pub b: f64,
    pub sweep: Vec<SweepRow>,
    pub p0_id: String,
}

impl SolvabilityEstimate {
    pub fn interval(&self) -> (f64, f64) {
        (self.lower_hat, self.upper_hat)
    }

    pub fn r_samples(&self) -> usize {
        self.sweep.len()
    }

    pub fn converged_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.sweep.iter().filter(|row| row.converged)
    }

    /// Whether `[lo, hi]` is certified to lie inside the solvability interval.
    pub fn contains(&self, lo: f64, hi: f64) -> bool {
        self.lower_hat <= lo && hi <= self.upper_hat
    }

    /// The estimate for the forcing `p0 + κ`: offsets move by `-κ`.
    pub fn shifted(&self, kappa: f64) -> Self {
        let mut out = self.clone();
        out.lower_hat -= kappa;
        out.upper_hat -= kappa;
        for row in &mut out.sweep {
            row.s_of_x -= kappa;
            row.solution.s -= kappa;
        }
        out
    }

    pub fn write_sweep_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_table(
            out,
            &["r", "s_of_x", "residual", "converged"],
            self.sweep.iter().map(|row| {
                vec![
                    fmt_full(row.r),
                    fmt_full(row.s_of_x),
                    fmt_full(row.residual),
                    row.converged.to_string(),
                ]
            }),
        )
    }

    pub fn summary(&self) -> String {
        format!(
            "d_hat = {}\nD_hat = {}\nb = {}\nr_samples = {}\nconverged_rows = {}\np0_id = \"{}\"\n",
            fmt_short(self.lower_hat),
            fmt_short(self.upper_hat),
            fmt_short(self.b),
            self.r_samples(),
            self.converged_rows().count(),
            self.p0_id
        )
    }
}

/// SHA-256 over the grid nodes and forcing samples.
pub fn forcing_digest(p0: &GridFunction) -> String {
    let mut hasher = Sha256::new();
    hasher.update((p0.len() as u64).to_le_bytes());
    hasher.update(p0.grid().period().to_le_bytes());
    for (&t, &v) in p0.grid().nodes().iter().zip(p0.values()) {
        hasher.update(t.to_le_bytes());
        hasher.update(v.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

fn row_from(solve: crate::solver::DirichletSolve, seed: RowSeed) -> SweepRow {
    SweepRow {
        r: solve.r,
        s_of_x: solve.solution.s_of_x,
        residual: solve.solution.residual_norm,
        converged: solve.converged,
        seed,
        solution: solve.solution,
    }
}

/// Sweeps `r` over a uniform grid on `[0, 2π)` and records `s(x)` for each
/// Dirichlet solution.
///
/// Rows are first solved independently from the constant seed `r`; rows
/// that fail are retried, in order of `r`, from the nearest converged row's
/// solution. The first pass depends on `r` alone, so nested `r`-grids give
/// nested certified sets.
pub fn sweep_interval(
    params: &PendulumParams,
    p0: &GridFunction,
    r_samples: usize,
    cfg: &SolverConfig,
) -> Result<SolvabilityEstimate> {
    if r_samples < MIN_R_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "r_samples = {r_samples} is below {MIN_R_SAMPLES}"
        )));
    }
    let p0 = p0.project_zero_mean();
    let rs: Vec<f64> = (0..r_samples)
        .map(|k| 2.0 * PI * k as f64 / r_samples as f64)
        .collect();

    let first: Vec<Result<SweepRow>> = rs
        .par_iter()
        .map(|&r| solve_dirichlet(r, params, &p0, cfg).map(|d| row_from(d, RowSeed::Constant)))
        .collect();
    let mut rows = first.into_iter().collect::<Result<Vec<_>>>()?;

    for i in 0..rows.len() {
        if rows[i].converged {
            continue;
        }
        let n = rows.len();
        let neighbor = (1..n)
            .flat_map(|d| [(i + n - d) % n, (i + d) % n])
            .find(|&j| rows[j].converged);
        if let Some(j) = neighbor {
            let seed = rows[j].solution.x.clone();
            let retry = solve_dirichlet_from(rows[i].r, params, &p0, &seed, cfg)?;
            if retry.converged || retry.solution.residual_norm < rows[i].residual {
                rows[i] = row_from(retry, RowSeed::Neighbor(j));
            }
        }
    }

    let certified: Vec<f64> = rows.iter().filter(|r| r.converged).map(|r| r.s_of_x).collect();
    if certified.is_empty() {
        return Err(Error::AllDiverged { table: rows });
    }
    let lower_hat = certified.iter().copied().fold(f64::INFINITY, f64::min);
    let upper_hat = certified.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SolvabilityEstimate {
        lower_hat,
        upper_hat,
        b: params.b,
        sweep: rows,
        p0_id: forcing_digest(&p0),
    })
}

/// Sweeps a forcing that need not have zero mean: the mean `κ` is absorbed
/// into the offset, so the estimate equals the projected one shifted by `-κ`.
pub fn sweep_interval_unprojected(
    params: &PendulumParams,
    forcing: &GridFunction,
    r_samples: usize,
    cfg: &SolverConfig,
) -> Result<SolvabilityEstimate> {
    let kappa = mean(forcing);
    Ok(sweep_interval(params, forcing, r_samples, cfg)?.shifted(kappa))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuityRow {
    pub perturbation_norm: f64,
    pub lower_shift: f64,
    pub upper_shift: f64,
}

#[derive(Clone, Debug)]
pub struct ContinuityProbe {
    pub base: (f64, f64),
    pub rows: Vec<ContinuityRow>,
}

impl ContinuityProbe {
    /// Endpoint movement is non-increasing as the perturbation shrinks,
    /// up to `slack`.
    pub fn shrinks_with_perturbation(&self, slack: f64) -> bool {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| b.perturbation_norm.total_cmp(&a.perturbation_norm));
        rows.windows(2).all(|w| {
            w[1].lower_shift <= w[0].lower_shift + slack && w[1].upper_shift <= w[0].upper_shift + slack
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_table(
            out,
            &["perturbation_norm", "lower_shift", "upper_shift"],
            self.rows.iter().map(|r| {
                vec![fmt_full(r.perturbation_norm), fmt_full(r.lower_shift), fmt_full(r.upper_shift)]
            }),
        )
    }
}

/// Re-sweeps `p0 + δp` for each perturbation and tabulates how far the
/// estimated endpoints move.
pub fn continuity_probe(
    params: &PendulumParams,
    p0: &GridFunction,
    perturbations: &[GridFunction],
    r_samples: usize,
    cfg: &SolverConfig,
) -> Result<ContinuityProbe> {
    for dp in perturbations {
        let integral = delta_integral(dp);
        let tol = zero_mean_tol(dp);
        if integral.abs() > tol {
            return Err(Error::NonZeroMean { integral, tol });
        }
    }
    let base = sweep_interval(params, p0, r_samples, cfg)?;
    let rows = perturbations
        .iter()
        .map(|dp| {
            let moved = sweep_interval(params, &p0.add(dp), r_samples, cfg)?;
            Ok(ContinuityRow {
                perturbation_norm: dp.norm_inf(),
                lower_shift: (moved.lower_hat - base.lower_hat).abs(),
                upper_shift: (moved.upper_hat - base.upper_hat).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuityProbe {
        base: base.interval(),
        rows,
    })
}

/// `min_k ‖x₁ - x₂ - 2πk‖∞`.
pub fn geometric_distance(x1: &GridFunction, x2: &GridFunction) -> f64 {
    let diff = x1.sub(x2);
    let k0 = (mean(&diff) / (2.0 * PI)).round();
    [k0 - 1.0, k0, k0 + 1.0]
        .iter()
        .map(|&k| diff.add_scalar(-2.0 * PI * k).norm_inf())
        .fold(f64::INFINITY, f64::min)
}

/// Starting functions for the multiplicity search.
#[derive(Clone, Debug, Default)]
pub struct SeedBank {
    seeds: Vec<GridFunction>,
}

impl SeedBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn seeds(&self) -> &[GridFunction] {
        &self.seeds
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn push(&mut self, seed: GridFunction) {
        self.seeds.push(seed);
    }

    /// Constants `r` and `r + π` for `r` on a uniform grid of `[0, π)`.
    pub fn with_constants(mut self, grid: &Arc<TimeScaleGrid>, count: usize) -> Self {
        for j in 0..count {
            let r = PI * j as f64 / count as f64;
            self.seeds.push(GridFunction::constant(grid, r));
            self.seeds.push(GridFunction::constant(grid, r + PI));
        }
        self
    }

    /// Sweep solutions bracketing `s`, plus the midpoint between the row
    /// just above `s` (a lower solution for `s`) and the row just below it
    /// (an upper solution), shifted by the first `2πk` that orders them.
    pub fn with_sweep(mut self, estimate: &SolvabilityEstimate, s: f64) -> Self {
        let below = estimate
            .converged_rows()
            .filter(|row| row.s_of_x < s)
            .max_by(|a, b| a.s_of_x.total_cmp(&b.s_of_x));
        let above = estimate
            .converged_rows()
            .filter(|row| row.s_of_x > s)
            .min_by(|a, b| a.s_of_x.total_cmp(&b.s_of_x));
        for row in [below, above].into_iter().flatten() {
            self.seeds.push(row.solution.x.clone());
        }
        if let (Some(upper), Some(lower)) = (below, above) {
            let alpha = &lower.solution.x;
            let beta = &upper.solution.x;
            let gap = alpha.sub(beta).max();
            let k = (gap / (2.0 * PI)).floor() + 1.0;
            let beta = beta.add_scalar(2.0 * PI * k);
            self.seeds.push(alpha.zip_with(&beta, |a, b| 0.5 * (a + b)));
            self.seeds.push(alpha.zip_with(&beta.add_scalar(2.0 * PI), |a, b| 0.5 * (a + b)));
        }
        self
    }

    /// Random constants in `[0, 2π)` with a small random first harmonic.
    pub fn with_random(mut self, grid: &Arc<TimeScaleGrid>, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = 2.0 * PI / grid.period();
        for _ in 0..count {
            let level: f64 = rng.random_range(0.0..2.0 * PI);
            let amp: f64 = rng.random_range(-0.1..0.1);
            let phase: f64 = rng.random_range(0.0..2.0 * PI);
            self.seeds
                .push(GridFunction::from_fn(grid, |t| level + amp * (w * t + phase).sin()));
        }
        self
    }
}

#[derive(Clone, Debug)]
pub struct MultiplicityReport {
    pub s: f64,
    /// Converged solutions, in seed order.
    pub solutions: Vec<PeriodicSolution>,
    /// Class index of each solution.
    pub classes: Vec<usize>,
    pub distinct_count: usize,
}

impl MultiplicityReport {
    /// First member of each class.
    pub fn representatives(&self) -> Vec<&PeriodicSolution> {
        (0..self.distinct_count)
            .map(|c| {
                let i = self.classes.iter().position(|&k| k == c).expect("nonempty class");
                &self.solutions[i]
            })
            .collect()
    }

    /// Smallest geometric distance between two classes.
    pub fn min_separation(&self) -> Option<f64> {
        let reps = self.representatives();
        let mut best: Option<f64> = None;
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                let d = geometric_distance(&reps[i].x, &reps[j].x);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }
}

/// Assigns each function to the first class whose representative lies within
/// `tol` modulo `2π`.
pub fn cluster_mod_two_pi(xs: &[&GridFunction], tol: f64) -> (Vec<usize>, usize) {
    let mut reps: Vec<usize> = Vec::new();
    let mut classes = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        match reps.iter().position(|&r| geometric_distance(x, xs[r]) <= tol) {
            Some(c) => classes.push(c),
            None => {
                classes.push(reps.len());
                reps.push(i);
            }
        }
    }
    let count = reps.len();
    (classes, count)
}

fn normalized(sol: PeriodicSolution) -> PeriodicSolution {
    let turns = (sol.x.values()[0] / (2.0 * PI)).floor() as i64;
    sol.shifted(-turns)
}

/// Multi-seed search at offset `s` from the default constant seed bank.
pub fn find_multiple_solutions(
    params: &PendulumParams,
    p0: &GridFunction,
    s: f64,
    cfg: &SolverConfig,
) -> Result<MultiplicityReport> {
    if !(s.abs() < params.b) {
        return Err(Error::InvalidParameter(format!(
            "s = {s} is not inside (-b, b) = (-{0}, {0})",
            params.b
        )));
    }
    let bank = SeedBank::new().with_constants(p0.grid(), 8);
    find_multiple_solutions_with(params, p0, s, &bank, cfg)
}

/// Multi-seed search with seeds from a sweep; `s` must lie inside the
/// estimated interval by at least `margin`.
pub fn find_multiple_solutions_in(
    estimate: &SolvabilityEstimate,
    params: &PendulumParams,
    p0: &GridFunction,
    s: f64,
    margin: f64,
    cfg: &SolverConfig,
) -> Result<MultiplicityReport> {
    if !(s > estimate.lower_hat + margin && s < estimate.upper_hat - margin) {
        return Err(Error::InvalidParameter(format!(
            "s = {s} is not inside [{}, {}] by margin {margin}",
            estimate.lower_hat, estimate.upper_hat
        )));
    }
    let bank = SeedBank::new()
        .with_constants(p0.grid(), 8)
        .with_sweep(estimate, s);
    find_multiple_solutions_with(params, p0, s, &bank, cfg)
}

pub fn find_multiple_solutions_with(
    params: &PendulumParams,
    p0: &GridFunction,
    s: f64,
    bank: &SeedBank,
    cfg: &SolverConfig,
) -> Result<MultiplicityReport> {
    let p0 = p0.project_zero_mean();
    let outcomes: Vec<Result<PeriodicSolution>> = bank
        .seeds()
        .par_iter()
        .map(|seed| solve_periodic(s, params, &p0, seed, cfg))
        .collect();
    let mut solutions = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(sol) => solutions.push(normalized(sol)),
            Err(Error::NotConverged { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let xs: Vec<&GridFunction> = solutions.iter().map(|s| &s.x).collect();
    let (classes, distinct_count) = cluster_mod_two_pi(&xs, CLUSTER_TOL);
    Ok(MultiplicityReport {
        s,
        solutions,
        classes,
        distinct_count,
    })
}
