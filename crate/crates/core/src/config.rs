//! Algorithm constants and run options.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::LinearSolver;

/// Algorithm variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    An2c,
    An2e,
    Soan2c,
    Soan2e,
    Ar2,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::An2c,
        Mode::An2e,
        Mode::Soan2c,
        Mode::Soan2e,
        Mode::Ar2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::An2c => "an2c",
            Mode::An2e => "an2e",
            Mode::Soan2c => "soan2c",
            Mode::Soan2e => "soan2e",
            Mode::Ar2 => "ar2",
        }
    }

    /// Terminates on the second-order test rather than on `‖g‖` alone.
    pub fn is_second_order(self) -> bool {
        matches!(self, Mode::Soan2c | Mode::Soan2e)
    }

    /// Tries the convex-regime step before the eigenvalue step.
    pub fn tries_convex_step(self) -> bool {
        matches!(self, Mode::An2c | Mode::Soan2c)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown algorithm `{s}` (expected an2c|an2e|soan2c|soan2e|ar2)"
                ))
            })
    }
}

/// How much of the iteration history a run keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceLevel {
    None,
    /// First and last iterations only.
    Summary,
    #[default]
    Full,
}

impl FromStr for TraceLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(TraceLevel::None),
            "summary" => Ok(TraceLevel::Summary),
            "full" => Ok(TraceLevel::Full),
            other => Err(Error::InvalidConfig(format!(
                "unknown trace level `{other}` (expected none|summary|full)"
            ))),
        }
    }
}

/// Solver constants. Defaults are the published experimental settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Gradient tolerance (ε, or ε₁ in second-order modes).
    pub eps1: f64,
    /// Curvature tolerance ε₂, second-order modes only.
    pub eps2: f64,
    pub sigma0: f64,
    pub sigma_min: f64,
    pub kappa_a: f64,
    #[serde(rename = "kappa_C")]
    pub kappa_c: f64,
    pub kappa_theta: f64,
    pub varsigma1: f64,
    pub varsigma2: f64,
    pub varsigma3: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub max_iter: usize,
    /// AR2 subproblem accuracy; `None` picks 1e-3 for n ≤ 100 and 1e-2 above.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_sub: Option<f64>,
    /// Relative residual tolerance of the minimum eigenpair.
    pub eig_tol: f64,
    pub linear_solver: LinearSolver,
    pub trace: TraceLevel,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: Mode::An2c,
            eps1: 1e-6,
            eps2: 1e-4,
            sigma0: 1.0,
            sigma_min: 1e-10,
            kappa_a: 100.0,
            kappa_c: 1e8,
            kappa_theta: 1.0,
            varsigma1: 0.5,
            varsigma2: 1e-10,
            varsigma3: 1e-10,
            gamma1: 0.5,
            gamma2: 10.0,
            gamma3: 10.0,
            eta1: 1e-4,
            eta2: 0.95,
            max_iter: 5000,
            theta_sub: None,
            eig_tol: 1e-8,
            linear_solver: LinearSolver::Direct,
            trace: TraceLevel::Full,
        }
    }
}

impl SolverConfig {
    pub fn with_mode(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn theta_sub_for(&self, n: usize) -> f64 {
        self.theta_sub.unwrap_or(if n <= 100 { 1e-3 } else { 1e-2 })
    }

    /// Checks every parameter range.
    pub fn validate(&self) -> Result<()> {
        fn need(ok: bool, what: &str, v: impl fmt::Display) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{what} (got {v})")))
            }
        }
        let c = self;
        need(
            c.eps1 > 0.0 && c.eps1 <= 1.0,
            "eps1 must lie in (0, 1]",
            c.eps1,
        )?;
        need(
            c.eps2 > 0.0 && c.eps2 <= 1.0,
            "eps2 must lie in (0, 1]",
            c.eps2,
        )?;
        need(
            c.sigma0 > 0.0 && c.sigma0.is_finite(),
            "sigma0 must be positive",
            c.sigma0,
        )?;
        need(
            c.sigma_min > 0.0 && c.sigma_min.is_finite(),
            "sigma_min must be positive",
            c.sigma_min,
        )?;
        need(
            c.kappa_a >= 1.0 && c.kappa_a.is_finite(),
            "kappa_a must be at least 1",
            c.kappa_a,
        )?;
        need(
            c.kappa_c > 0.0 && c.kappa_c.is_finite(),
            "kappa_C must be positive",
            c.kappa_c,
        )?;
        need(
            c.kappa_theta > 0.0 && c.kappa_theta.is_finite(),
            "kappa_theta must be positive",
            c.kappa_theta,
        )?;
        need(
            c.varsigma1 > 0.0 && c.varsigma1 < 1.0,
            "varsigma1 must lie in (0, 1)",
            c.varsigma1,
        )?;
        need(
            c.varsigma2 >= 0.0 && c.varsigma2 < 0.5,
            "varsigma2 must lie in [0, 1/2)",
            c.varsigma2,
        )?;
        need(
            c.varsigma3 >= 0.0 && c.varsigma3 < 1.0,
            "varsigma3 must lie in [0, 1)",
            c.varsigma3,
        )?;
        need(
            c.gamma1 > 0.0 && c.gamma1 < 1.0,
            "gamma1 must lie in (0, 1)",
            c.gamma1,
        )?;
        need(
            c.gamma2 > 1.0 && c.gamma2.is_finite(),
            "gamma2 must exceed 1",
            c.gamma2,
        )?;
        need(
            c.gamma3 >= c.gamma2 && c.gamma3.is_finite(),
            "gamma3 must be at least gamma2",
            c.gamma3,
        )?;
        need(
            c.eta1 > 0.0 && c.eta1 <= 1.0,
            "eta1 must lie in (0, 1]",
            c.eta1,
        )?;
        need(
            c.eta2 >= c.eta1 && c.eta2 < 1.0,
            "eta2 must lie in [eta1, 1)",
            c.eta2,
        )?;
        need(c.max_iter > 0, "max_iter must be positive", c.max_iter)?;
        if let Some(t) = c.theta_sub {
            need(t > 0.0 && t.is_finite(), "theta_sub must be positive", t)?;
        }
        need(
            c.eig_tol > 0.0 && c.eig_tol < 1.0,
            "eig_tol must lie in (0, 1)",
            c.eig_tol,
        )?;
        Ok(())
    }
}
