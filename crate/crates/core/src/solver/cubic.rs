//! Cubic-regularized model minimization
//! `min gᵀs + ½ sᵀHs + (σ/3)‖s‖³` over a growing Lanczos space.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Approximate cubic-model minimizer.
#[derive(Debug, Clone)]
pub struct CubicSolution {
    pub s: DVector<f64>,
    /// Multiplier `σ‖s‖` of the secular equation.
    pub lambda: f64,
    /// `‖g + Hs + σ‖s‖s‖`, recomputed from `s`.
    pub model_grad_norm: f64,
    /// Decrease of the cubic model, `−(gᵀs + ½ sᵀHs + (σ/3)‖s‖³)`.
    pub model_decrease: f64,
    pub krylov_dim: usize,
    /// The dense fallback was needed.
    pub restarted: bool,
}

/// Stopping rule `‖∇m(s)‖ ≤ ½ θ σ ‖s‖²`.
fn exit_ok(grad: f64, sigma: f64, snorm: f64, theta: f64) -> bool {
    grad <= 0.5 * theta * sigma * snorm * snorm
}

fn finish(
    g: &DVector<f64>,
    h: &SymMatrix,
    sigma: f64,
    s: DVector<f64>,
    lambda: f64,
    krylov_dim: usize,
    restarted: bool,
) -> CubicSolution {
    let sn = s.norm();
    let grad = (g + h.mul_vec(&s) + &s * (sigma * sn)).norm();
    let model_decrease = -(h.model_change(g, &s) + sigma / 3.0 * sn.powi(3));
    CubicSolution {
        s,
        lambda,
        model_grad_norm: grad,
        model_decrease,
        krylov_dim,
        restarted,
    }
}

/// Minimizes the cubic model until `‖g + Hs + σ‖s‖s‖ ≤ ½ θ σ ‖s‖²`.
///
/// The Lanczos space starts from `g` and grows one vector at a time, up to
/// `n`. If the test is still unmet, one dense eigenbasis solve is tried.
pub fn solve_cubic_subproblem(
    g: &DVector<f64>,
    h: &SymMatrix,
    sigma: f64,
    theta: f64,
) -> Result<CubicSolution> {
    let n = g.len();
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: n,
        });
    }
    if !(sigma > 0.0) || !(theta > 0.0) {
        return Err(Error::Contract(format!(
            "sigma = {sigma} and theta = {theta} must be positive"
        )));
    }
    let gnorm = g.norm();
    if !(gnorm > 0.0) || !gnorm.is_finite() || !h.is_finite() {
        return Err(Error::Contract(
            "cubic subproblem needs a finite nonzero gradient".into(),
        ));
    }

    let mut q: Vec<DVector<f64>> = vec![g / gnorm];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for j in 0..n {
        let mut w = h.mul_vec(&q[j]);
        alpha.push(q[j].dot(&w));
        for _ in 0..2 {
            for qi in &q {
                let c = qi.dot(&w);
                w.axpy(-c, qi, 1.0);
            }
        }
        let b = w.norm();
        let (y, lambda) = match tridiagonal_cubic(&alpha, &beta, gnorm, sigma) {
            Some(sol) => sol,
            None => break,
        };
        let yn = y.norm();
        let invariant = b <= f64::EPSILON * h.norm_inf().max(1.0);
        if invariant || exit_ok(b * y[j].abs(), sigma, yn, theta) {
            let mut s = DVector::zeros(n);
            for (yk, qk) in y.iter().zip(&q) {
                s.axpy(*yk, qk, 1.0);
            }
            let sol = finish(g, h, sigma, s, lambda, j + 1, false);
            if exit_ok(sol.model_grad_norm, sigma, sol.s.norm(), theta) {
                return Ok(sol);
            }
            if invariant {
                break;
            }
        }
        beta.push(b);
        q.push(w / b);
    }

    log::debug!("cubic subproblem: Krylov space exhausted (n = {n}), dense solve");
    let eig = SymmetricEigen::try_new(h.to_dense(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Subproblem("eigendecomposition failed".into()))?;
    let ghat: Vec<f64> = (eig.eigenvectors.transpose() * g).iter().copied().collect();
    let theta_vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let (yhat, lambda) = secular_eigenbasis(&theta_vals, &ghat, sigma)
        .ok_or_else(|| Error::Subproblem("secular equation has no solution".into()))?;
    let s = &eig.eigenvectors * DVector::from_vec(yhat);
    let sol = finish(g, h, sigma, s, lambda, n, true);
    if exit_ok(sol.model_grad_norm, sigma, sol.s.norm(), theta) && sol.model_decrease > 0.0 {
        Ok(sol)
    } else {
        Err(Error::Subproblem(format!(
            "model gradient {:e} above tolerance after dense solve",
            sol.model_grad_norm
        )))
    }
}

/// Cubic minimizer on the tridiagonal `(alpha, beta)` with right-hand side
/// `gnorm e₁`: `(T + λI) y = −gnorm e₁`, `λ = σ‖y‖`, `T + λI ⪰ 0`.
fn tridiagonal_cubic(
    alpha: &[f64],
    beta: &[f64],
    gnorm: f64,
    sigma: f64,
) -> Option<(DVector<f64>, f64)> {
    let m = alpha.len();
    let theta_min = tridiagonal_min_eig(alpha, beta);
    let lo = (-theta_min).max(0.0);
    let mut rhs = vec![0.0; m];
    rhs[0] = -gnorm;
    // ‖y(λ)‖ − λ/σ is decreasing on (lo, ∞); negative at `hi`
    let hi = theta_min.abs() + (sigma * gnorm).sqrt() + lo;
    let scale = hi.max(f64::MIN_POSITIVE);
    let probe = lo + 1e-12 * scale;
    match ldl_solve(alpha, beta, probe, &rhs) {
        Some(y) if y.norm() > probe / sigma => {}
        // hard case or T + λI numerically singular near lo: dense eigenbasis
        _ => return dense_tridiagonal(alpha, beta, gnorm, sigma),
    }
    let (mut a, mut b) = (probe, hi * 1.01 + f64::MIN_POSITIVE);
    let mut lambda = b;
    let mut best: Option<(DVector<f64>, f64)> = None;
    for _ in 0..200 {
        let y = ldl_solve(alpha, beta, lambda, &rhs)?;
        let yn = y.norm();
        let psi = yn - lambda / sigma;
        if psi > 0.0 {
            a = lambda;
        } else {
            b = lambda;
        }
        let done = (psi.abs() <= 1e-14 * (lambda / sigma).max(yn)) || (b - a) <= 1e-15 * b;
        // Newton on φ(λ) = 1/‖y‖ − σ/λ, φ' = yᵀ(T+λI)⁻¹y/‖y‖³ + σ/λ²
        let w = ldl_solve(alpha, beta, lambda, &y.iter().copied().collect::<Vec<_>>())?;
        let phi = 1.0 / yn - sigma / lambda;
        let dphi = y.dot(&w) / yn.powi(3) + sigma / (lambda * lambda);
        best = Some((y, lambda));
        if done {
            break;
        }
        let next = lambda - phi / dphi;
        lambda = if next.is_finite() && next > a && next < b {
            next
        } else {
            0.5 * (a + b)
        };
    }
    best
}

/// Secular solve on the full eigendecomposition of the tridiagonal.
fn dense_tridiagonal(
    alpha: &[f64],
    beta: &[f64],
    gnorm: f64,
    sigma: f64,
) -> Option<(DVector<f64>, f64)> {
    let eig = SymmetricEigen::try_new(tridiagonal(alpha, beta), f64::EPSILON, 0)?;
    let ghat: Vec<f64> = eig.eigenvectors.row(0).iter().map(|u| u * gnorm).collect();
    let theta: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let (yhat, lambda) = secular_eigenbasis(&theta, &ghat, sigma)?;
    Some((&eig.eigenvectors * DVector::from_vec(yhat), lambda))
}

/// Solves `(Θ + λI) ŷ = −ĝ`, `‖ŷ‖ = λ/σ` for diagonal `Θ`, including the hard
/// case where `ĝ` has no component along the leftmost eigenvectors.
fn secular_eigenbasis(theta: &[f64], ghat: &[f64], sigma: f64) -> Option<(Vec<f64>, f64)> {
    let tmin = theta.iter().copied().fold(f64::INFINITY, f64::min);
    let tmax = theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gn = ghat.iter().map(|v| v * v).sum::<f64>().sqrt();
    let lo = (-tmin).max(0.0);
    let spread = (tmax - tmin).abs().max(1.0);
    let is_min = |t: f64| t - tmin <= 1e-12 * spread;
    let norm_at = |lam: f64, skip_min: bool| -> f64 {
        theta
            .iter()
            .zip(ghat)
            .filter(|(t, _)| !(skip_min && is_min(**t)))
            .map(|(t, gi)| (gi / (t + lam)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let gmin = theta
        .iter()
        .zip(ghat)
        .filter(|(t, _)| is_min(**t))
        .map(|(_, gi)| gi * gi)
        .sum::<f64>()
        .sqrt();
    if lo > 0.0 && gmin <= 1e-12 * gn.max(f64::MIN_POSITIVE) {
        let rest = norm_at(lo, true);
        if rest <= lo / sigma {
            // hard case: λ = −θmin, pad along the first leftmost eigenvector
            let tau = ((lo / sigma).powi(2) - rest * rest).max(0.0).sqrt();
            let mut y: Vec<f64> = theta
                .iter()
                .zip(ghat)
                .map(|(t, gi)| if is_min(*t) { 0.0 } else { -gi / (t + lo) })
                .collect();
            let idx = theta.iter().position(|t| is_min(*t))?;
            y[idx] = tau;
            return Some((y, lo));
        }
    }
    let (mut a, mut b) = (lo, lo + tmin.abs() + (sigma * gn).sqrt() + 1.0);
    while norm_at(b, false) > b / sigma {
        b *= 2.0;
        if !b.is_finite() {
            return None;
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if norm_at(mid, false) > mid / sigma {
            a = mid;
        } else {
            b = mid;
        }
    }
    let lam = b;
    let y = theta
        .iter()
        .zip(ghat)
        .map(|(t, gi)| -gi / (t + lam))
        .collect();
    Some((y, lam))
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    })
}

/// Number of eigenvalues of the tridiagonal below `x` (Sturm count).
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..alpha.len() {
        let b2 = if i == 0 {
            0.0
        } else {
            beta[i - 1] * beta[i - 1]
        };
        d = alpha[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (alpha[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of the tridiagonal by bisection on the Sturm count.
fn tridiagonal_min_eig(alpha: &[f64], beta: &[f64]) -> f64 {
    let m = alpha.len();
    let radius = |i: usize| {
        (if i > 0 { beta[i - 1].abs() } else { 0.0 })
            + (if i + 1 < m { beta[i].abs() } else { 0.0 })
    };
    let mut a = (0..m)
        .map(|i| alpha[i] - radius(i))
        .fold(f64::INFINITY, f64::min);
    let mut b = (0..m)
        .map(|i| alpha[i] + radius(i))
        .fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if sturm_count(alpha, beta, mid) >= 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    a
}

/// Solves `(T + λI) y = rhs` by LDLᵀ; `None` if a pivot is not positive.
fn ldl_solve(alpha: &[f64], beta: &[f64], lambda: f64, rhs: &[f64]) -> Option<DVector<f64>> {
    let m = alpha.len();
    let mut d = vec![0.0; m];
    let mut l = vec![0.0; m];
    for i in 0..m {
        d[i] = alpha[i] + lambda - if i > 0 { l[i] * l[i] * d[i - 1] } else { 0.0 };
        if !(d[i] > 0.0) {
            return None;
        }
        if i + 1 < m {
            l[i + 1] = beta[i] / d[i];
        }
    }
    let mut z = rhs.to_vec();
    for i in 1..m {
        z[i] -= l[i] * z[i - 1];
    }
    for i in 0..m {
        z[i] /= d[i];
    }
    for i in (0..m.saturating_sub(1)).rev() {
        z[i] -= l[i + 1] * z[i + 1];
    }
    Some(DVector::from_vec(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(g: f64, h: f64) -> CubicSolution {
        solve_cubic_subproblem(
            &DVector::from_vec(vec![g]),
            &SymMatrix::from_diagonal(&[h]),
            1.0,
            1e-3,
        )
        .unwrap()
    }

    #[test]
    fn scalar_closed_forms() {
        assert!((one_d(1.0, 0.0).s[0] + 1.0).abs() < 1e-12);
        let golden = (1.0 - 5f64.sqrt()) / 2.0;
        assert!((one_d(1.0, 1.0).s[0] - golden).abs() < 1e-12);
    }

    #[test]
    fn negative_curvature_direction() {
        // g has no component on the negative eigenvector at first, but Lanczos finds it
        let h = SymMatrix::from_diagonal(&[-2.0, 1.0, 3.0]);
        let g = DVector::from_vec(vec![1e-3, 1.0, 0.5]);
        let sol = solve_cubic_subproblem(&g, &h, 1.0, 1e-3).unwrap();
        assert!(sol.lambda >= 2.0);
        assert!(sol.model_decrease > 0.0);
        assert!(exit_ok(sol.model_grad_norm, 1.0, sol.s.norm(), 1e-3));
    }

    #[test]
    fn krylov_stationary_point_accepted() {
        // g orthogonal to the leftmost eigenvector: the Krylov space is invariant
        let h = SymMatrix::from_diagonal(&[-1.0, 2.0]);
        let g = DVector::from_vec(vec![0.0, 1.0]);
        let sol = solve_cubic_subproblem(&g, &h, 1.0, 1e-3).unwrap();
        assert!(!sol.restarted);
        assert_eq!(sol.s[0], 0.0);
        assert!(exit_ok(sol.model_grad_norm, 1.0, sol.s.norm(), 1e-3));
    }

    #[test]
    fn hard_case_eigenbasis() {
        let (y, lam) = secular_eigenbasis(&[-1.0, 2.0], &[0.0, 1.0], 1.0).unwrap();
        assert_eq!(lam, 1.0);
        assert!((y[1] + 1.0 / 3.0).abs() < 1e-15);
        assert!(((y[0] * y[0] + y[1] * y[1]).sqrt() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sturm_min_matches_dense() {
        let alpha = [2.0, -1.0, 0.5, 3.0];
        let beta = [0.7, -1.3, 0.2];
        let dense = SymmetricEigen::new(tridiagonal(&alpha, &beta))
            .eigenvalues
            .min();
        assert!((tridiagonal_min_eig(&alpha, &beta) - dense).abs() < 1e-12);
    }
}
