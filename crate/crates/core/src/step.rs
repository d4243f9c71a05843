//! Trial steps: convex-regime Newton, eigenvalue-regularized Newton,
//! negative curvature, and the second-order escape step.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::linalg::{
    all_finite, min_eigenpair, probe_spd, regularized_solve, solve_with_factor, EigenPair,
    FactorizationOutcome, LinearSolver, SymMatrix,
};
use crate::problems::Counters;

/// Residuals below `ROUNDING_FLOOR · (‖g‖ + (‖H‖∞ + μ)‖s‖)` are treated as an
/// exact solve by the direct backend.
pub const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Relative slack used when checking step bounds.
pub const BOUND_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepTag {
    Conv,
    Neig,
    Curv,
    So,
    Ar2,
}

impl StepTag {
    pub fn as_str(self) -> &'static str {
        match self {
            StepTag::Conv => "conv",
            StepTag::Neig => "neig",
            StepTag::Curv => "curv",
            StepTag::So => "so",
            StepTag::Ar2 => "ar2",
        }
    }
}

/// A computed trial step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub s: DVector<f64>,
    pub tag: StepTag,
    /// `‖(H + μI)s + g‖`; zero for `curv` and `so`.
    pub residual_norm: f64,
    pub lambda_min_used: Option<f64>,
    /// `−(gᵀs + ½ sᵀHs)`.
    pub model_decrease: f64,
    /// Shift of the linear system, for `conv` and `neig`.
    pub mu: Option<f64>,
}

/// Why the convex-regime step was not taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    Indefinite,
    NormCap,
    Residual,
}

#[derive(Debug, Clone)]
pub enum ConvexAttempt {
    Accepted(StepOutcome),
    Rejected(Rejection),
}

fn check_inputs(g: &DVector<f64>, h: &SymMatrix, sigma: f64) -> Result<f64> {
    if g.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: g.len(),
        });
    }
    if !all_finite(g) || !h.is_finite() || !sigma.is_finite() {
        return Err(Error::NonFinite("step inputs".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::Contract(format!("sigma = {sigma} must be positive")));
    }
    Ok(g.norm())
}

fn outcome(h: &SymMatrix, g: &DVector<f64>, s: DVector<f64>, tag: StepTag) -> StepOutcome {
    let model_decrease = -h.model_change(g, &s);
    StepOutcome {
        s,
        tag,
        residual_norm: 0.0,
        lambda_min_used: None,
        model_decrease,
        mu: None,
    }
}

/// Residual predicate `‖r‖ ≤ min(c ‖s‖, κθ ‖g‖)`, plus the direct-backend
/// rounding floor.
fn residual_ok(
    res: f64,
    snorm: f64,
    gnorm: f64,
    c: f64,
    kappa_theta: f64,
    floor_scale: Option<f64>,
) -> bool {
    if res <= (c * snorm).min(kappa_theta * gnorm) {
        return true;
    }
    match floor_scale {
        Some(hn_mu) => res <= ROUNDING_FLOOR * (gnorm + hn_mu * snorm),
        None => false,
    }
}

/// Convex-regime step `(H + √(κa σ‖g‖) I) s = −g`, rejected if the shifted
/// matrix is indefinite, the residual test fails, or `‖s‖` exceeds its cap.
pub fn try_convex_step(
    g: &DVector<f64>,
    h: &SymMatrix,
    sigma: f64,
    cfg: &SolverConfig,
    counters: &mut Counters,
) -> Result<ConvexAttempt> {
    let gnorm = check_inputs(g, h, sigma)?;
    if !(gnorm > 0.0) {
        return Err(Error::Contract(
            "convex step needs a nonzero gradient".into(),
        ));
    }
    let mu = (cfg.kappa_a * sigma * gnorm).sqrt();
    counters.factorizations += 1;
    let factor = match probe_spd(h, mu)? {
        FactorizationOutcome::Indefinite { .. } => {
            return Ok(ConvexAttempt::Rejected(Rejection::Indefinite))
        }
        FactorizationOutcome::PositiveDefinite(f) => f,
    };
    let c = cfg.varsigma2 * mu;
    let solved = match cfg.linear_solver {
        LinearSolver::Direct => {
            let floor = Some(h.norm_inf() + mu);
            solve_with_factor(h, &factor, g, |r, sn, gn| {
                residual_ok(r, sn, gn, c, cfg.kappa_theta, floor)
            })
        }
        LinearSolver::Cg => regularized_solve(
            h,
            mu,
            g,
            |r, sn, gn| residual_ok(r, sn, gn, c, cfg.kappa_theta, None),
            LinearSolver::Cg,
        ),
    };
    let sol = match solved {
        Ok(sol) => sol,
        Err(Error::StepFailure { .. }) => return Ok(ConvexAttempt::Rejected(Rejection::Residual)),
        Err(e) => return Err(e),
    };
    let cap = (1.0 + cfg.kappa_theta) / cfg.varsigma1 * (gnorm / (cfg.kappa_a * sigma)).sqrt();
    if sol.s.norm() > cap {
        return Ok(ConvexAttempt::Rejected(Rejection::NormCap));
    }
    let mut out = outcome(h, g, sol.s, StepTag::Conv);
    out.residual_norm = sol.residual_norm;
    out.mu = Some(mu);
    Ok(ConvexAttempt::Accepted(out))
}

/// Eigenvalue-regularized Newton step, computing the minimum eigenpair.
pub fn eigen_newton_step(
    g: &DVector<f64>,
    h: &SymMatrix,
    sigma: f64,
    cfg: &SolverConfig,
    counters: &mut Counters,
) -> Result<StepOutcome> {
    check_inputs(g, h, sigma)?;
    counters.eigen_solves += 1;
    let eig = min_eigenpair(h, cfg.eig_tol)?;
    eigen_newton_step_with(g, h, sigma, cfg, &eig, counters)
}

/// Eigenvalue-regularized Newton step with a known minimum eigenpair.
///
/// If `−λmin ≤ κC √(σ‖g‖)` solves `(H + (√(σ‖g‖) + [−λmin]₊) I) s = −g`,
/// otherwise moves a distance `κC √(σ‖g‖)/σ` along the eigenvector.
pub fn eigen_newton_step_with(
    g: &DVector<f64>,
    h: &SymMatrix,
    sigma: f64,
    cfg: &SolverConfig,
    eig: &EigenPair,
    counters: &mut Counters,
) -> Result<StepOutcome> {
    let gnorm = check_inputs(g, h, sigma)?;
    if !(gnorm > 0.0) {
        return Err(Error::Contract(
            "eigen-Newton step needs a nonzero gradient".into(),
        ));
    }
    let lambda = eig.lambda_min;
    let root = (sigma * gnorm).sqrt();
    let threshold = cfg.kappa_c * root;
    if -lambda <= threshold {
        let mu = root + (-lambda).max(0.0);
        let c = cfg.varsigma3 * root;
        let strict = |r: f64, sn: f64, gn: f64| residual_ok(r, sn, gn, c, cfg.kappa_theta, None);
        let direct = |counters: &mut Counters| {
            counters.factorizations += 1;
            let floor = Some(h.norm_inf() + mu);
            regularized_solve(
                h,
                mu,
                g,
                |r, sn, gn| residual_ok(r, sn, gn, c, cfg.kappa_theta, floor),
                LinearSolver::Direct,
            )
        };
        let sol = match cfg.linear_solver {
            LinearSolver::Direct => direct(counters)?,
            LinearSolver::Cg => match regularized_solve(h, mu, g, strict, LinearSolver::Cg) {
                Ok(sol) => sol,
                Err(Error::StepFailure { .. }) => direct(counters)?,
                Err(e) => return Err(e),
            },
        };
        let mut out = outcome(h, g, sol.s, StepTag::Neig);
        out.residual_norm = sol.residual_norm;
        out.mu = Some(mu);
        out.lambda_min_used = Some(lambda);
        Ok(out)
    } else {
        let v = oriented(g, &eig.v);
        let alpha = threshold / sigma;
        let mut out = outcome(h, g, v * alpha, StepTag::Curv);
        out.lambda_min_used = Some(lambda);
        Ok(out)
    }
}

/// Second-order escape step `s = (−λmin/σ) v` along a descent-oriented
/// eigenvector. Requires `λmin < 0`.
pub fn second_order_step(
    g: &DVector<f64>,
    h: &SymMatrix,
    sigma: f64,
    eig: &EigenPair,
) -> Result<StepOutcome> {
    check_inputs(g, h, sigma)?;
    let lambda = eig.lambda_min;
    if !(lambda < 0.0) {
        return Err(Error::Contract(format!(
            "second-order step needs lambda_min < 0, got {lambda}"
        )));
    }
    let v = oriented(g, &eig.v);
    let mut out = outcome(h, g, v * (-lambda / sigma), StepTag::So);
    out.lambda_min_used = Some(lambda);
    Ok(out)
}

/// Flips `v` so that `gᵀv ≤ 0`; keeps the given sign when `gᵀv = 0`.
fn oriented(g: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    if g.dot(v) > 0.0 {
        -v
    } else {
        v.clone()
    }
}

/// Checks the step-norm and model-decrease bounds for `step`, taken at a
/// point with gradient `g`, Hessian `h`, and regularization `sigma`.
/// Returns a description of the first violated bound.
pub fn bound_violation(
    step: &StepOutcome,
    g: &DVector<f64>,
    h: &SymMatrix,
    sigma: f64,
    cfg: &SolverConfig,
) -> Option<String> {
    let gnorm = g.norm();
    let sn = step.s.norm();
    let md = step.model_decrease;
    let le = |a: f64, b: f64| a <= b + BOUND_SLACK * b.abs().max(a.abs());
    let eq = |a: f64, b: f64| (a - b).abs() <= BOUND_SLACK * b.abs().max(a.abs());
    let root = (sigma * gnorm).sqrt();
    let fail = |what: &str, lhs: f64, rhs: f64| {
        Some(format!(
            "{} step: {what} ({lhs:e} vs {rhs:e})",
            step.tag.as_str()
        ))
    };
    match step.tag {
        StepTag::Conv => {
            let cap =
                (1.0 + cfg.kappa_theta) / cfg.varsigma1 * (gnorm / (cfg.kappa_a * sigma)).sqrt();
            if !le(sn, cap) {
                return fail("norm cap", sn, cap);
            }
            let lb =
                (1.0 - 2.0 * cfg.varsigma2) / 2.0 * (cfg.kappa_a * sigma * gnorm).sqrt() * sn * sn;
            if !le(lb, md) {
                return fail("model decrease", md, lb);
            }
        }
        StepTag::Neig => {
            let cap = (1.0 + cfg.kappa_theta) * (gnorm / sigma).sqrt();
            if !le(sn, cap) {
                return fail("norm cap", sn, cap);
            }
            let lb = (1.0 - cfg.varsigma3) * root * sn * sn;
            if !le(lb, md) {
                return fail("model decrease", md, lb);
            }
        }
        StepTag::Curv => {
            let len = cfg.kappa_c * root / sigma;
            if !eq(sn, len) {
                return fail("step length", sn, len);
            }
            let lb = 0.5 * sigma * sn.powi(3);
            if !le(lb, md) {
                return fail("model decrease", md, lb);
            }
            let curv = h.quad_form(&step.s) / (sn * sn);
            if !le(curv, -cfg.kappa_c * root) {
                return fail("curvature", curv, -cfg.kappa_c * root);
            }
            if g.dot(&step.s) > 0.0 {
                return fail("descent", g.dot(&step.s), 0.0);
            }
        }
        StepTag::So => {
            let lambda = step.lambda_min_used.unwrap_or(f64::NAN);
            let len = lambda.abs() / sigma;
            if !eq(sn, len) {
                return fail("step length", sn, len);
            }
            let lb = 0.5 * sigma * sn.powi(3);
            if !le(lb, md) {
                return fail("model decrease", md, lb);
            }
        }
        StepTag::Ar2 => {}
    }
    None
}
