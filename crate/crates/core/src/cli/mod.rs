//! Command-line front end.
//!
//! Every command prints a short `key = value` report on stdout. With
//! `--emit <dir>` it also writes the report and its CSV tables into `dir`.
//! Exit status: 0 success, 1 condition fails, 2 usage or config error,
//! 3 solver non-convergence, 4 bound inapplicable (`ck ≥ π`).

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{KMethod, KRule};
use crate::error::Error;
use crate::relativistic::Bound;

pub use config::{Loaded, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONDITION_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_INAPPLICABLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "tspend", version, about = "Periodic solutions of the relativistic pendulum on time scales")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Directory for CSV tables and the report (created if missing).
    #[arg(long, global = true, value_name = "DIR")]
    pub emit: Option<PathBuf>,
    /// Worker threads for sweeps and seed banks.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Overrides the command's main tolerance.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Checks the sufficient condition for 0 ∈ I(p0) and tabulates ψ.
    Bounds {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum, default_value = "universal")]
        k_method: KMethodArg,
        /// Points of the ψ table.
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Computes the critical period T*.
    Tstar {
        #[arg(long, value_enum)]
        k_rule: KRuleArg,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Estimates the solvability interval by a Dirichlet sweep.
    Interval {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 64)]
        r_samples: usize,
    },
    /// Solves the periodic problem for one offset.
    Solve {
        #[command(flatten)]
        config: ConfigArg,
        /// Offset; defaults to `forcing.s` from the config.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[command(flatten)]
        seed: SeedChoice,
    },
    /// Checks a solution, lower or upper solution read from CSV.
    Verify {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_name = "PATH")]
        solution: PathBuf,
        #[arg(long, value_enum, default_value = "solution")]
        role: RoleArg,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
    },
    /// Reports the constant k in ‖x - x̄‖∞ ≤ k‖x^Δ‖∞.
    Kconst {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum, default_value = "universal")]
        method: KMethodArg,
    },
    /// Searches for geometrically distinct solutions at one offset.
    Multi {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        /// Extra random seeds, drawn from the config `seed`.
        #[arg(long, default_value_t = 8)]
        random: usize,
    },
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct SeedChoice {
    /// Constant initial guess.
    #[arg(long, allow_hyphen_values = true)]
    pub seed_value: Option<f64>,
    /// Initial guess read from a solution or `t,value` table.
    #[arg(long, value_name = "PATH")]
    pub seed_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum KMethodArg {
    Universal,
    SobolevContinuous,
    ExactDiscrete,
}

impl From<KMethodArg> for KMethod {
    fn from(m: KMethodArg) -> Self {
        match m {
            KMethodArg::Universal => KMethod::Universal,
            KMethodArg::SobolevContinuous => KMethod::SobolevContinuous,
            KMethodArg::ExactDiscrete => KMethod::ExactDiscrete,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum KRuleArg {
    Universal,
    SobolevContinuous,
}

impl From<KRuleArg> for KRule {
    fn from(r: KRuleArg) -> Self {
        match r {
            KRuleArg::Universal => KRule::Universal,
            KRuleArg::SobolevContinuous => KRule::SobolevContinuous,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    Solution,
    Lower,
    Upper,
}

impl RoleArg {
    fn bound(self) -> Option<Bound> {
        match self {
            RoleArg::Solution => None,
            RoleArg::Lower => Some(Bound::Lower),
            RoleArg::Upper => Some(Bound::Upper),
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotConverged { .. } | Error::AllDiverged { .. } => EXIT_NOT_CONVERGED,
        Error::PreconditionCk { .. } => EXIT_INAPPLICABLE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` and runs the command, writing the report to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match commands::dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
