//! Discrete T-periodic time scales and Δ-calculus on them.
//!
//! A [`TimeScaleGrid`] holds one period of a closed periodic set. Scattered
//! points carry their true graininess `μ(t) = σ(t) - t`; dense stretches are
//! realized by a fine uniform sub-grid whose step plays the role of an
//! effective graininess. With that convention every node has `μ > 0`, the
//! effective measures tile `[0, T)` exactly, and the Δ-derivative and
//! Δ-integral are plain forward differences and left-endpoint sums.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{fmt_full, write_table};

/// Relative tolerance of the zero-mean precondition, scaled by `T·‖f‖∞`.
pub const ZERO_MEAN_REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    Continuous,
    UniformDiscrete,
    IntervalUnion,
}

impl ScaleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScaleKind::Continuous => "continuous",
            ScaleKind::UniformDiscrete => "uniform_discrete",
            ScaleKind::IntervalUnion => "interval_union",
        }
    }
}

/// Description of one period of a time scale.
///
/// `resolution` is the node count per period for `continuous` and
/// `uniform_discrete`, and the number of steps per unit of dense length for
/// the intervals of an `interval_union`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeScaleSpec {
    pub period: f64,
    pub kind: ScaleKind,
    pub resolution: usize,
    #[serde(default)]
    pub intervals: Vec<[f64; 2]>,
    #[serde(default)]
    pub points: Vec<f64>,
}

impl TimeScaleSpec {
    pub fn continuous(period: f64, resolution: usize) -> Self {
        Self {
            period,
            kind: ScaleKind::Continuous,
            resolution,
            intervals: Vec::new(),
            points: Vec::new(),
        }
    }

    /// `hℤ` with `h = period / n`.
    pub fn uniform_discrete(period: f64, n: usize) -> Self {
        Self {
            period,
            kind: ScaleKind::UniformDiscrete,
            resolution: n,
            intervals: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn interval_union(
        period: f64,
        resolution: usize,
        intervals: Vec<[f64; 2]>,
        points: Vec<f64>,
    ) -> Self {
        Self {
            period,
            kind: ScaleKind::IntervalUnion,
            resolution,
            intervals,
            points,
        }
    }

    pub fn build(&self) -> Result<Arc<TimeScaleGrid>> {
        build_grid(self).map(Arc::new)
    }
}

/// One period of a discretized time scale.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeScaleGrid {
    nodes: Vec<f64>,
    graininess: Vec<f64>,
    dense: Vec<bool>,
    period: f64,
    kind: ScaleKind,
}

impl TimeScaleGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Effective graininess, one entry per node.
    pub fn graininess(&self) -> &[f64] {
        &self.graininess
    }

    /// Whether node `i` approximates a right-dense point.
    pub fn is_dense(&self, i: usize) -> bool {
        self.dense[i]
    }

    /// True when every node belongs to a dense stretch, i.e. the grid
    /// discretizes `ℝ`.
    pub fn is_continuous(&self) -> bool {
        self.dense.iter().all(|&d| d)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn kind(&self) -> ScaleKind {
        self.kind
    }

    /// Forward jump `σ(tᵢ)`, lifted past `T` at the last node.
    pub fn sigma(&self, i: usize) -> f64 {
        self.nodes[i] + self.graininess[i]
    }

    /// Largest effective step; the discretization error scale on dense parts.
    pub fn max_step(&self) -> f64 {
        self.graininess.iter().copied().fold(0.0, f64::max)
    }
}

pub fn build_grid(spec: &TimeScaleSpec) -> Result<TimeScaleGrid> {
    let period = spec.period;
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidTimeScale(format!(
            "period must be positive, got {period}"
        )));
    }
    if spec.resolution == 0 {
        return Err(Error::InvalidTimeScale("resolution must be positive".into()));
    }
    match spec.kind {
        ScaleKind::Continuous | ScaleKind::UniformDiscrete => {
            if !spec.intervals.is_empty() || !spec.points.is_empty() {
                return Err(Error::InvalidTimeScale(format!(
                    "kind {} takes no intervals or points",
                    spec.kind.as_str()
                )));
            }
            let n = spec.resolution;
            let h = period / n as f64;
            let dense = spec.kind == ScaleKind::Continuous;
            Ok(TimeScaleGrid {
                nodes: (0..n).map(|i| i as f64 * h).collect(),
                graininess: vec![h; n],
                dense: vec![dense; n],
                period,
                kind: spec.kind,
            })
        }
        ScaleKind::IntervalUnion => build_union(spec),
    }
}

fn build_union(spec: &TimeScaleSpec) -> Result<TimeScaleGrid> {
    let period = spec.period;
    let eps = 1e-12 * period;

    let mut intervals = spec.intervals.clone();
    for &[a, b] in &intervals {
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || b > period + eps || a > b || a >= period
        {
            return Err(Error::InvalidTimeScale(format!(
                "interval [{a}, {b}] is not a subinterval of [0, {period}]"
            )));
        }
    }
    intervals.sort_by(|x, y| x[0].total_cmp(&y[0]));
    for w in intervals.windows(2) {
        if w[1][0] <= w[0][1] {
            return Err(Error::InvalidTimeScale(format!(
                "intervals [{}, {}] and [{}, {}] overlap",
                w[0][0], w[0][1], w[1][0], w[1][1]
            )));
        }
    }
    // (time, dense)
    let mut raw: Vec<(f64, bool)> = Vec::new();
    for &[a, b] in &intervals {
        let len = b - a;
        if len <= eps {
            raw.push((a, false));
            continue;
        }
        let steps = ((spec.resolution as f64 * len).ceil() as usize).max(1);
        let h = len / steps as f64;
        for j in 0..steps {
            raw.push((a + j as f64 * h, true));
        }
        if b >= period - eps {
            // T is identified with 0, which must then be a node.
            raw.push((0.0, false));
        } else {
            raw.push((b, false));
        }
    }
    for &p in &spec.points {
        if !p.is_finite() || p < 0.0 || p >= period {
            return Err(Error::InvalidTimeScale(format!(
                "point {p} is outside [0, {period})"
            )));
        }
        if intervals.iter().any(|&[a, b]| p > a + eps && p < b - eps) {
            return Err(Error::InvalidTimeScale(format!(
                "point {p} is interior to an interval"
            )));
        }
        raw.push((p, false));
    }
    if raw.is_empty() {
        return Err(Error::InvalidTimeScale("time scale is empty".into()));
    }

    raw.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut nodes: Vec<f64> = Vec::with_capacity(raw.len());
    let mut dense: Vec<bool> = Vec::with_capacity(raw.len());
    for (t, d) in raw {
        match nodes.last() {
            Some(&last) if t - last <= eps => {
                // coincident entries: a dense node wins over a scattered duplicate
                let k = dense.len() - 1;
                dense[k] |= d;
            }
            _ => {
                nodes.push(t);
                dense.push(d);
            }
        }
    }
    let n = nodes.len();
    let graininess: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 < n {
                nodes[i + 1] - nodes[i]
            } else {
                nodes[0] + period - nodes[i]
            }
        })
        .collect();
    let total: f64 = graininess.iter().sum();
    assert!(
        (total - period).abs() <= 1e-9 * period,
        "effective graininess sums to {total}, expected {period}"
    );
    Ok(TimeScaleGrid {
        nodes,
        graininess,
        dense,
        period,
        kind: ScaleKind::IntervalUnion,
    })
}

/// Real samples attached to the nodes of a grid, extended periodically.
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<TimeScaleGrid>,
    values: Vec<f64>,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.same_grid(other) && self.values == other.values
    }
}

impl GridFunction {
    pub fn new(grid: Arc<TimeScaleGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Arc<TimeScaleGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn constant(grid: &Arc<TimeScaleGrid>, value: f64) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![value; grid.len()],
        }
    }

    pub fn zeros(grid: &Arc<TimeScaleGrid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> &Arc<TimeScaleGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Nodewise combination; panics if the grids differ.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        assert!(self.same_grid(other), "grid functions live on different grids");
        GridFunction {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add_scalar(&self, k: f64) -> GridFunction {
        self.map(|v| v + k)
    }

    pub fn scale(&self, k: f64) -> GridFunction {
        self.map(|v| v * k)
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a - b)
    }

    /// `f - mean(f)`.
    pub fn project_zero_mean(&self) -> GridFunction {
        self.add_scalar(-mean(self))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_table(
            out,
            &["t", "value"],
            self.grid
                .nodes()
                .iter()
                .zip(&self.values)
                .map(|(&t, &v)| vec![fmt_full(t), fmt_full(v)]),
        )
    }

    /// Reads a `t,value` table whose `t` column must reproduce the grid nodes.
    pub fn read_csv<R: Read>(grid: &Arc<TimeScaleGrid>, input: R) -> Result<GridFunction> {
        let columns = read_columns(input, &["t", "value"])?;
        check_nodes(grid, &columns[0])?;
        GridFunction::new(Arc::clone(grid), columns[1].clone())
    }
}

/// Reads the named numeric columns of a headed CSV table.
pub(crate) fn read_columns<R: Read>(input: R, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let index: Vec<usize> = names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| Error::Config(format!("CSV is missing column `{name}`")))
        })
        .collect::<Result<_>>()?;
    let mut columns = vec![Vec::new(); names.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        for (col, &i) in index.iter().enumerate() {
            let field = record.get(i).unwrap_or("");
            let value: f64 = field.parse().map_err(|_| {
                Error::Config(format!(
                    "CSV row {}: column `{}` has non-numeric value `{field}`",
                    line + 2,
                    names[col]
                ))
            })?;
            columns[col].push(value);
        }
    }
    Ok(columns)
}

pub(crate) fn check_nodes(grid: &TimeScaleGrid, times: &[f64]) -> Result<()> {
    if times.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "CSV has {} rows, grid has {} nodes",
            times.len(),
            grid.len()
        )));
    }
    let tol = 1e-9 * grid.period();
    for (i, (&t, &node)) in times.iter().zip(grid.nodes()).enumerate() {
        if (t - node).abs() > tol {
            return Err(Error::GridMismatch(format!(
                "row {i}: t = {t} does not match node {node}"
            )));
        }
    }
    Ok(())
}

/// Forward Δ-derivative of a periodic grid function.
pub fn delta_derivative(f: &GridFunction) -> GridFunction {
    let n = f.len();
    let mu = f.grid.graininess();
    let v = &f.values;
    let values = (0..n).map(|i| (v[(i + 1) % n] - v[i]) / mu[i]).collect();
    GridFunction {
        grid: Arc::clone(&f.grid),
        values,
    }
}

/// Δ-derivative of a function given in closed form, sampled at `tᵢ` and
/// `σ(tᵢ)`. Unlike [`delta_derivative`] this does not assume periodicity,
/// so `f(t) = t²` on `hℤ` yields `2t + h` at every node including the last.
pub fn delta_derivative_fn(grid: &Arc<TimeScaleGrid>, f: impl Fn(f64) -> f64) -> GridFunction {
    let values = (0..grid.len())
        .map(|i| (f(grid.sigma(i)) - f(grid.nodes()[i])) / grid.graininess()[i])
        .collect();
    GridFunction {
        grid: Arc::clone(grid),
        values,
    }
}

/// `∫₀ᵀ f Δt` over one period.
pub fn delta_integral(f: &GridFunction) -> f64 {
    f.grid
        .graininess()
        .iter()
        .zip(&f.values)
        .map(|(m, v)| m * v)
        .sum()
}

pub fn mean(f: &GridFunction) -> f64 {
    delta_integral(f) / f.grid.period()
}

/// The zero-mean Δ-antiderivative, with the default tolerance on the
/// zero-mean precondition.
pub fn antiderivative_zero_mean(f: &GridFunction) -> Result<GridFunction> {
    antiderivative_zero_mean_with_tol(f, ZERO_MEAN_REL_TOL)
}

pub fn antiderivative_zero_mean_with_tol(f: &GridFunction, rel_tol: f64) -> Result<GridFunction> {
    let integral = delta_integral(f);
    let tol = rel_tol * f.grid.period() * f.norm_inf().max(1.0);
    if integral.abs() > tol {
        return Err(Error::NonZeroMean { integral, tol });
    }
    Ok(cumulative_zero_mean(f))
}

/// Admissible `|∫f Δt|` for data that should have zero mean. The floor of
/// 1 on the scale keeps rounding noise in near-zero data acceptable.
pub(crate) fn zero_mean_tol(f: &GridFunction) -> f64 {
    ZERO_MEAN_REL_TOL * f.grid.period() * f.norm_inf().max(1.0)
}

/// `F₀ = 0, Fᵢ₊₁ = Fᵢ + μᵢ fᵢ`, shifted to zero mean. No precondition check.
pub(crate) fn cumulative_zero_mean(f: &GridFunction) -> GridFunction {
    let mut out = cumulative(f, 0.0);
    let shift = mean(&out);
    for v in &mut out.values {
        *v -= shift;
    }
    out
}

/// `F₀ = start, Fᵢ₊₁ = Fᵢ + μᵢ fᵢ`.
pub(crate) fn cumulative(f: &GridFunction, start: f64) -> GridFunction {
    let mu = f.grid.graininess();
    let mut values = Vec::with_capacity(f.len());
    let mut acc = start;
    for (m, v) in mu.iter().zip(&f.values) {
        values.push(acc);
        acc += m * v;
    }
    GridFunction {
        grid: Arc::clone(&f.grid),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hz(n: usize, period: f64) -> Arc<TimeScaleGrid> {
        TimeScaleSpec::uniform_discrete(period, n).build().unwrap()
    }

    #[test]
    fn uniform_discrete_grid() {
        let g = hz(4, 1.0);
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75]);
        assert_eq!(g.graininess(), &[0.25; 4]);
        assert!(!g.is_continuous());
    }

    #[test]
    fn continuous_grid() {
        let g = TimeScaleSpec::continuous(1.0, 1000).build().unwrap();
        assert_eq!(g.len(), 1000);
        assert!(g.graininess().iter().all(|&m| (m - 0.001).abs() < 1e-15));
        assert!(g.is_continuous());
    }

    #[test]
    fn hybrid_grid_tiles_the_period() {
        let spec = TimeScaleSpec::interval_union(2.0, 10, vec![[0.0, 1.0]], vec![1.5]);
        let g = spec.build().unwrap();
        assert_eq!(g.len(), 12);
        let idx_one = g.nodes().iter().position(|&t| (t - 1.0).abs() < 1e-12).unwrap();
        assert!((g.graininess()[idx_one] - 0.5).abs() < 1e-12);
        assert!(!g.is_dense(idx_one));
        assert!(g.is_dense(0));
        let last = g.len() - 1;
        assert!((g.nodes()[last] - 1.5).abs() < 1e-12);
        assert!((g.graininess()[last] - 0.5).abs() < 1e-12);
        let total: f64 = g.graininess().iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn interval_reaching_the_period_wraps_to_zero() {
        let spec = TimeScaleSpec::interval_union(1.0, 8, vec![[0.5, 1.0]], vec![]);
        let g = spec.build().unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.5, 0.625, 0.75, 0.875]);
        assert!((g.graininess()[0] - 0.5).abs() < 1e-15);
        assert!(g.graininess()[1..].iter().all(|&m| (m - 0.125).abs() < 1e-15));
    }

    #[test]
    fn point_on_interval_endpoint_is_merged() {
        let spec = TimeScaleSpec::interval_union(2.0, 2, vec![[0.0, 1.0]], vec![1.0]);
        let g = spec.build().unwrap();
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            TimeScaleSpec::continuous(0.0, 10),
            TimeScaleSpec::continuous(-1.0, 10),
            TimeScaleSpec::interval_union(1.0, 10, vec![], vec![]),
            TimeScaleSpec::interval_union(1.0, 10, vec![[0.0, 0.5], [0.4, 0.8]], vec![]),
            TimeScaleSpec::interval_union(1.0, 10, vec![[0.0, 0.5], [0.5, 0.8]], vec![]),
            TimeScaleSpec::interval_union(1.0, 10, vec![[0.0, 0.5]], vec![0.25]),
            TimeScaleSpec::interval_union(1.0, 10, vec![], vec![1.0]),
            TimeScaleSpec::uniform_discrete(1.0, 0),
        ];
        for spec in bad {
            assert!(
                matches!(build_grid(&spec), Err(Error::InvalidTimeScale(_))),
                "{spec:?}"
            );
        }
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = hz(7, 3.0);
        let d = delta_derivative(&GridFunction::constant(&g, 2.5));
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn derivative_of_square_on_hz() {
        let h = 0.125;
        let g = hz(8, 1.0);
        let d = delta_derivative_fn(&g, |t| t * t);
        for (&t, &v) in g.nodes().iter().zip(d.values()) {
            let oracle = ((t + h) * (t + h) - t * t) / h;
            assert!((v - oracle).abs() <= 4.0 * f64::EPSILON);
            assert!((v - (2.0 * t + h)).abs() <= 1e-14);
        }
    }

    #[test]
    fn derivative_of_sine_converges() {
        let mut prev = f64::INFINITY;
        for n in [100, 200, 400, 800] {
            let g = TimeScaleSpec::continuous(2.0, n).build().unwrap();
            let w = std::f64::consts::PI;
            let d = delta_derivative(&GridFunction::from_fn(&g, |t| (w * t).sin()));
            let err = g
                .nodes()
                .iter()
                .zip(d.values())
                .map(|(&t, &v)| (v - w * (w * t).cos()).abs())
                .fold(0.0, f64::max);
            assert!(err < 10.0 * g.max_step());
            assert!(err < prev * 0.6);
            prev = err;
        }
    }

    #[test]
    fn integrals_and_means() {
        let g = hz(4, 1.0);
        assert_eq!(delta_integral(&GridFunction::constant(&g, 1.0)), 1.0);
        let f = GridFunction::new(g.clone(), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((delta_integral(&f) - 2.5).abs() < 1e-15);

        let g2 = hz(2, 1.0);
        let f = GridFunction::new(g2.clone(), vec![0.0, 1.0]).unwrap();
        assert_eq!(mean(&f), 0.5);
        assert!(mean(&f.project_zero_mean()).abs() < 1e-16);

        let c = TimeScaleSpec::continuous(3.0, 600).build().unwrap();
        assert!((mean(&GridFunction::constant(&c, 0.7)) - 0.7).abs() < 1e-14);
        let s = GridFunction::from_fn(&c, |t| (2.0 * std::f64::consts::PI * t / 3.0).sin());
        assert!(delta_integral(&s).abs() < c.max_step());
    }

    #[test]
    fn antiderivative_two_nodes() {
        let g = hz(2, 1.0);
        let f = GridFunction::new(g, vec![1.0, -1.0]).unwrap();
        let big_f = antiderivative_zero_mean(&f).unwrap();
        assert_eq!(big_f.values(), &[-0.25, 0.25]);
        assert_eq!(delta_derivative(&big_f).values(), f.values());
        assert_eq!(mean(&big_f), 0.0);
    }

    #[test]
    fn antiderivative_of_zero_and_rejection_of_nonzero_mean() {
        let g = hz(5, 1.0);
        let z = antiderivative_zero_mean(&GridFunction::zeros(&g)).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        let f = GridFunction::constant(&g, 1.0);
        assert!(matches!(
            antiderivative_zero_mean(&f),
            Err(Error::NonZeroMean { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let g = TimeScaleSpec::interval_union(2.0, 5, vec![[0.0, 1.0]], vec![1.5])
            .build()
            .unwrap();
        let f = GridFunction::from_fn(&g, |t| (3.0 * t).cos() / 7.0);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,value\n"));
        let back = GridFunction::read_csv(&g, buf.as_slice()).unwrap();
        assert_eq!(back, f);

        let other = hz(3, 2.0);
        assert!(GridFunction::read_csv(&other, buf.as_slice()).is_err());
    }
}
