//! Time-scale (Δ) calculus on periodic grids and the forced relativistic
//! pendulum `(φ(x^Δ))^Δ + a x^Δ + b sin x = p0 + s`.
//!
//! A time scale is represented by a [`timescale::TimeScaleGrid`]: dense
//! parts are resolved by a fine uniform mesh, scattered points are kept
//! exactly. On that grid the crate solves the periodic and Dirichlet
//! problems, sweeps the solvability interval `I(p0) = [d, D]`, searches
//! for geometrically distinct solutions and evaluates the explicit
//! critical-period bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod io;
pub mod relativistic;
pub mod solvability;
pub mod solver;
pub mod timescale;

pub use error::{Error, Result};
