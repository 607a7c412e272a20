//! Constructive operators for the periodic problem and the two solvers built
//! on them: a relaxed fixed-point iteration on `M_f` and a damped Newton
//! method on the node system in φ-slope coordinates.

mod newton;
mod operators;
mod problems;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use operators::{k_operator, mf_operator, nemitskii, solve_c_of_h};
pub use problems::{
    solve_dirichlet, solve_dirichlet_from, solve_periodic, DirichletSolve,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    PicardMf,
    Newton,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::PicardMf => "picard_mf",
            Strategy::Newton => "newton",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub bisection_tol: f64,
    pub relaxation: f64,
    pub strategy: Strategy,
}

impl SolverConfig {
    /// Defaults for a pendulum of amplitude `b`: residual tolerance
    /// `1e-8·max(1, b)`, 100 Newton steps or 10⁴ fixed-point sweeps.
    pub fn for_strategy(strategy: Strategy, b: f64) -> Self {
        Self {
            max_iterations: match strategy {
                Strategy::Newton => 100,
                Strategy::PicardMf => 10_000,
            },
            residual_tol: 1e-8 * b.max(1.0),
            bisection_tol: 1e-12,
            relaxation: 0.5,
            strategy,
        }
    }

    pub fn newton(b: f64) -> Self {
        Self::for_strategy(Strategy::Newton, b)
    }

    pub fn picard(b: f64) -> Self {
        Self::for_strategy(Strategy::PicardMf, b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        if !(self.residual_tol > 0.0 && self.bisection_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "relaxation {} outside (0, 1]",
                self.relaxation
            )));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::newton(1.0)
    }
}
