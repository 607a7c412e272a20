//! The TOML run configuration.
//!
//! ```toml
//! seed = 7
//!
//! [timescale]
//! period = 1.0
//! kind = "continuous"
//! resolution = 200
//!
//! [params]
//! a = 1.0
//! b = 1.0
//! c = 1.0
//!
//! [forcing]
//! series = [[1, 0.0, 0.5]]   # k, cos, sin
//! s = 0.0
//!
//! [solver]
//! strategy = "newton"
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::relativistic::{evaluate_series, PendulumParams, SeriesTerm};
use crate::solver::{SolverConfig, Strategy};
use crate::timescale::{GridFunction, TimeScaleGrid, TimeScaleSpec};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub timescale: TimeScaleSpec,
    pub params: Option<ParamsSection>,
    #[serde(default)]
    pub forcing: ForcingSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub seed: Option<u64>,
}

/// `T` may be omitted; it defaults to the time-scale period.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(rename = "T")]
    pub period: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    /// `[k, cos, sin]` triples.
    #[serde(default)]
    pub series: Vec<[f64; 3]>,
    /// A `t,value` table on the grid nodes, relative to the config file.
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub s: f64,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub strategy: Option<Strategy>,
    pub max_iterations: Option<usize>,
    pub residual_tol: Option<f64>,
    pub bisection_tol: Option<f64>,
    pub relaxation: Option<f64>,
}

/// A parsed config with the grid built and the forcing evaluated.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub grid: Arc<TimeScaleGrid>,
    pub params: Option<PendulumParams>,
    pub p0: GridFunction,
    pub s: f64,
    pub solver: SolverConfig,
    pub seed: Option<u64>,
}

impl Loaded {
    pub fn params(&self) -> Result<&PendulumParams> {
        self.params
            .as_ref()
            .ok_or_else(|| Error::Config("missing [params] section".into()))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Loaded> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let cfg = Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        cfg.resolve(path.parent().unwrap_or(Path::new(".")))
    }

    /// Builds the grid and forcing; relative CSV paths start at `base`.
    pub fn resolve(&self, base: &Path) -> Result<Loaded> {
        let grid = self.timescale.build()?;
        let params = match self.params {
            None => None,
            Some(p) => {
                let period = p.period.unwrap_or(grid.period());
                if (period - grid.period()).abs() > 1e-12 * grid.period() {
                    return Err(Error::Config(format!(
                        "params.T = {period} differs from timescale.period = {}",
                        grid.period()
                    )));
                }
                Some(PendulumParams::new(p.a, p.b, p.c, grid.period())?)
            }
        };

        let f = &self.forcing;
        if !f.s.is_finite() {
            return Err(Error::Config(format!("forcing.s = {} is not finite", f.s)));
        }
        let p0 = match (&f.csv, f.series.is_empty()) {
            (Some(_), false) => {
                return Err(Error::Config(
                    "forcing: give either `series` or `csv`, not both".into(),
                ))
            }
            (Some(rel), true) => {
                let path = base.join(rel);
                let file = fs::File::open(&path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                GridFunction::read_csv(&grid, file)?
            }
            (None, _) => {
                let terms = f
                    .series
                    .iter()
                    .map(|&[k, cos, sin]| {
                        if !(k >= 0.0 && k.fract() == 0.0 && k <= u32::MAX as f64) {
                            return Err(Error::Config(format!(
                                "forcing.series: k = {k} is not a nonnegative integer"
                            )));
                        }
                        Ok(SeriesTerm { k: k as u32, cos, sin })
                    })
                    .collect::<Result<Vec<_>>>()?;
                evaluate_series(&grid, &terms)
            }
        };

        let b = params.map_or(1.0, |p| p.b);
        let sec = &self.solver;
        let mut solver = SolverConfig::for_strategy(sec.strategy.unwrap_or(Strategy::Newton), b);
        if let Some(v) = sec.max_iterations {
            solver.max_iterations = v;
        }
        if let Some(v) = sec.residual_tol {
            solver.residual_tol = v;
        }
        if let Some(v) = sec.bisection_tol {
            solver.bisection_tol = v;
        }
        if let Some(v) = sec.relaxation {
            solver.relaxation = v;
        }
        solver.validate()?;

        Ok(Loaded {
            grid,
            params,
            p0,
            s: f.s,
            solver,
            seed: self.seed,
        })
    }
}
