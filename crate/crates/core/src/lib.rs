//! Adaptive regularized Newton methods that exploit negative curvature.
//!
//! [`solve`] runs one of the AN2C/AN2E/SOAN2C/SOAN2E variants or the cubic
//! regularization baseline on a [`problems::Problem`]; [`bench`] runs grids
//! of solvers and problems and summarizes them with performance profiles.
// NaN must fail every numeric precondition, hence `!(x > 0.0)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod config;
pub mod error;
pub mod linalg;
pub mod problems;
pub mod step;

pub use config::{Mode, SolverConfig, TraceLevel};
pub use error::{Error, Result};
pub mod solver;

pub use solver::{solve, solve_ar2, RunRecord, Status};
