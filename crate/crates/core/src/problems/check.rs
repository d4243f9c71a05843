//! Central finite-difference check of analytic derivatives.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Problem;
use crate::error::{Error, Result};

/// Largest accepted relative gradient error.
pub const GRAD_TOLERANCE: f64 = 1e-5;
/// Largest accepted relative Hessian error.
pub const HESS_TOLERANCE: f64 = 1e-4;

/// Componentwise-max relative errors `|fd − exact| / max(1, |exact|)`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DerivativeReport {
    pub max_rel_grad_err: f64,
    pub max_rel_hess_err: f64,
    pub probe_points: Vec<Vec<f64>>,
}

impl DerivativeReport {
    pub fn within_tolerance(&self) -> bool {
        self.max_rel_grad_err <= GRAD_TOLERANCE && self.max_rel_hess_err <= HESS_TOLERANCE
    }

    fn merge(&mut self, other: DerivativeReport) {
        self.max_rel_grad_err = self.max_rel_grad_err.max(other.max_rel_grad_err);
        self.max_rel_hess_err = self.max_rel_hess_err.max(other.max_rel_hess_err);
        self.probe_points.extend(other.probe_points);
    }
}

fn rel_err(approx: f64, exact: f64) -> f64 {
    (approx - exact).abs() / exact.abs().max(1.0)
}

/// Compares the analytic gradient and Hessian at `x` against central
/// differences of `f` and of the gradient, with step `h · max(1, |x_i|)`.
pub fn check_derivatives(problem: &Problem, x: &DVector<f64>, h: f64) -> Result<DerivativeReport> {
    if !(h > 0.0) {
        return Err(Error::Contract(format!(
            "finite-difference step {h} must be positive"
        )));
    }
    let n = problem.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let probe_err = || Error::ProbeNonFinite {
        point: x.iter().copied().collect(),
    };
    let g = problem.gradient(x);
    let hess = problem.hessian(x);
    if !problem.value(x).is_finite() || g.iter().any(|v| !v.is_finite()) || !hess.is_finite() {
        return Err(probe_err());
    }

    let mut grad_err: f64 = 0.0;
    let mut hess_err: f64 = 0.0;
    let mut xp = x.clone();
    for i in 0..n {
        let step = h * x[i].abs().max(1.0);
        let xi = x[i];
        xp[i] = xi + step;
        let (fp, gp) = (problem.value(&xp), problem.gradient(&xp));
        xp[i] = xi - step;
        let (fm, gm) = (problem.value(&xp), problem.gradient(&xp));
        xp[i] = xi;
        if !fp.is_finite() || !fm.is_finite() || gp.iter().chain(gm.iter()).any(|v| !v.is_finite())
        {
            return Err(probe_err());
        }
        let denom = (xi + step) - (xi - step);
        grad_err = grad_err.max(rel_err((fp - fm) / denom, g[i]));
        for j in 0..n {
            hess_err = hess_err.max(rel_err((gp[j] - gm[j]) / denom, hess.get(j, i)));
        }
    }
    Ok(DerivativeReport {
        max_rel_grad_err: grad_err,
        max_rel_hess_err: hess_err,
        probe_points: vec![x.iter().copied().collect()],
    })
}

/// Checks at the standard start and `points` random points around it
/// (`x0_i + u · max(1, |x0_i|)`, `u ~ U(−1, 1)`).
pub fn check_problem(
    problem: &Problem,
    h: f64,
    points: usize,
    seed: u64,
) -> Result<DerivativeReport> {
    let mut report = check_derivatives(problem, problem.x0(), h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = problem.x0();
    for _ in 0..points {
        let x = DVector::from_fn(x0.len(), |i, _| {
            x0[i] + rng.gen_range(-1.0..1.0) * x0[i].abs().max(1.0)
        });
        report.merge(check_derivatives(problem, &x, h)?);
    }
    Ok(report)
}
