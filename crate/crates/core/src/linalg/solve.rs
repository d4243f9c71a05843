use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{all_finite, cg::conjugate_gradient, probe_spd, CholeskyFactor, SymMatrix};
use crate::error::{Error, Result};

/// Backend used for the regularized Newton systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LinearSolver {
    /// Cholesky factorization plus one step of iterative refinement.
    #[default]
    Direct,
    /// Conjugate gradients stopped by the residual predicate.
    Cg,
}

impl std::str::FromStr for LinearSolver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direct" => Ok(LinearSolver::Direct),
            "cg" => Ok(LinearSolver::Cg),
            other => Err(format!(
                "unknown linear solver `{other}` (expected direct|cg)"
            )),
        }
    }
}

/// Approximate solution of `(H + mu I) s = -g`.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub s: DVector<f64>,
    /// `‖(H + mu I) s + g‖`, recomputed from the returned `s`.
    pub residual_norm: f64,
    /// Inner iterations (refinement steps or CG iterations).
    pub iterations: usize,
    /// Number of factorizations performed by this call.
    pub factorizations: usize,
}

/// Solves `(H + mu I) s = -g` until `accept(residual_norm, ‖s‖, ‖g‖)` holds.
///
/// The caller guarantees `H + mu I ≻ 0`. The direct backend factorizes once;
/// the CG backend is limited to `5 n` iterations.
pub fn regularized_solve<F>(
    h: &SymMatrix,
    mu: f64,
    g: &DVector<f64>,
    accept: F,
    backend: LinearSolver,
) -> Result<SolveResult>
where
    F: Fn(f64, f64, f64) -> bool,
{
    check_inputs(h, mu, g)?;
    match backend {
        LinearSolver::Direct => {
            let factor = probe_spd(h, mu)?
                .into_factor()
                .ok_or(Error::NotPositiveDefinite { shift: mu })?;
            let mut res = solve_with_factor(h, &factor, g, accept)?;
            res.factorizations = 1;
            Ok(res)
        }
        LinearSolver::Cg => {
            let budget = 5 * h.dim().max(1);
            let (s, iterations) = conjugate_gradient(h, mu, g, &accept, budget);
            let residual_norm = h.shifted_residual(mu, &s, g).norm();
            if all_finite(&s) && accept(residual_norm, s.norm(), g.norm()) {
                Ok(SolveResult {
                    s,
                    residual_norm,
                    iterations,
                    factorizations: 0,
                })
            } else {
                Err(Error::StepFailure {
                    residual: residual_norm,
                    iterations,
                })
            }
        }
    }
}

/// Direct solve reusing an existing factor of `H + mu I`.
pub fn solve_with_factor<F>(
    h: &SymMatrix,
    factor: &CholeskyFactor,
    g: &DVector<f64>,
    accept: F,
) -> Result<SolveResult>
where
    F: Fn(f64, f64, f64) -> bool,
{
    let mu = factor.shift();
    let mut s = -factor.solve(g);
    let r = h.shifted_residual(mu, &s, g);
    s -= factor.solve(&r);
    let residual_norm = h.shifted_residual(mu, &s, g).norm();
    if !all_finite(&s) || !residual_norm.is_finite() {
        return Err(Error::NonFinite(
            "regularized solve produced non-finite step".into(),
        ));
    }
    if accept(residual_norm, s.norm(), g.norm()) {
        Ok(SolveResult {
            s,
            residual_norm,
            iterations: 1,
            factorizations: 0,
        })
    } else {
        Err(Error::StepFailure {
            residual: residual_norm,
            iterations: 1,
        })
    }
}

fn check_inputs(h: &SymMatrix, mu: f64, g: &DVector<f64>) -> Result<()> {
    if h.dim() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: g.len(),
        });
    }
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::NonFinite(format!("shift {mu}")));
    }
    if !all_finite(g) || !h.is_finite() {
        return Err(Error::NonFinite("system data".into()));
    }
    Ok(())
}
