use thiserror::Error;

use crate::relativistic::PeriodicSolution;
use crate::solvability::SweepRow;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time scale: {0}")]
    InvalidTimeScale(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A discrete slope reached the speed bound `c`.
    #[error("speed limit violated: |slope| = {speed} >= c = {c}")]
    SpeedLimit { speed: f64, c: f64 },

    /// The input is not in the zero-mean subspace.
    #[error("function does not have zero mean: integral = {integral:e}, tolerance = {tol:e}")]
    NonZeroMean { integral: f64, tol: f64 },

    #[error("bisection bracket [{lo}, {hi}] has no sign change")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        best: Box<PeriodicSolution>,
    },

    #[error("all {} sweep rows diverged", .table.len())]
    AllDiverged { table: Vec<SweepRow> },

    #[error("c*k = {ck} outside the admissible range {range}")]
    PreconditionCk { ck: f64, range: &'static str },

    #[error("delta = {0} outside (0, pi/2)")]
    DeltaOutOfRange(f64),

    #[error("k-constant method unavailable: {0}")]
    MethodUnavailable(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
