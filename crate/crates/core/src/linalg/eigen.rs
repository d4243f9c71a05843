//! Minimum eigenpair of a symmetric matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SymMatrix, DENSE_LIMIT};
use crate::error::{Error, Result};

/// Maximum Lanczos basis size before a restart.
const LANCZOS_MAX_BASIS: usize = 200;

/// Leftmost eigenvalue with a unit eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda_min: f64,
    pub v: DVector<f64>,
    /// `‖H v − lambda_min v‖` at return.
    pub residual: f64,
}

/// Minimum eigenpair to within `tol · max(1, ‖H‖∞)`.
///
/// Dense storage goes straight to a full symmetric eigendecomposition; sparse
/// storage runs Lanczos first and falls back to the dense path if it does not
/// converge after one restart.
pub fn min_eigenpair(h: &SymMatrix, tol: f64) -> Result<EigenPair> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "eigen tolerance {tol} must be positive"
        )));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite("Hessian has non-finite entries".into()));
    }
    if h.dim() == 0 {
        return Err(Error::EigenFailure("empty matrix".into()));
    }
    match h {
        SymMatrix::Dense(_) => dense_min_eigenpair(h, tol),
        SymMatrix::Sparse(_) if h.dim() <= DENSE_LIMIT => dense_min_eigenpair(h, tol),
        SymMatrix::Sparse(_) => match lanczos_min_eigenpair(h, tol) {
            Some(p) => Ok(p),
            None => {
                log::debug!("lanczos did not converge (n = {}), dense fallback", h.dim());
                dense_min_eigenpair(h, tol)
            }
        },
    }
}

/// Full symmetric eigendecomposition.
pub fn dense_min_eigenpair(h: &SymMatrix, tol: f64) -> Result<EigenPair> {
    let m = h.to_dense();
    let scale = h.norm_inf().max(1.0);
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0).ok_or_else(|| {
        Error::EigenFailure("symmetric eigendecomposition did not converge".into())
    })?;
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::EigenFailure("no eigenvalues".into()))?;
    let mut v: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    let nv = v.norm();
    if !(nv > 0.0) || !nv.is_finite() {
        return Err(Error::EigenFailure("degenerate eigenvector".into()));
    }
    v /= nv;
    let lambda_min = eig.eigenvalues[idx];
    let residual = (h.mul_vec(&v) - &v * lambda_min).norm();
    if !(residual <= tol * scale) {
        return Err(Error::EigenFailure(format!(
            "dense eigenpair residual {residual:e} exceeds {:e}",
            tol * scale
        )));
    }
    Ok(EigenPair {
        lambda_min,
        v,
        residual,
    })
}

/// Lanczos with full reorthogonalization, at most one restart.
///
/// Returns `None` when the residual test is not met within the basis budget.
pub fn lanczos_min_eigenpair(h: &SymMatrix, tol: f64) -> Option<EigenPair> {
    let n = h.dim();
    let scale = h.norm_inf().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut start = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    for attempt in 0..2 {
        match lanczos_pass(h, &start, tol * scale) {
            Ok(pair) => return Some(pair),
            Err(best) => {
                log::debug!("lanczos pass {attempt} exhausted its basis");
                start = best;
            }
        }
    }
    None
}

/// One Lanczos sweep; on failure returns the best Ritz vector for a restart.
fn lanczos_pass(
    h: &SymMatrix,
    start: &DVector<f64>,
    abs_tol: f64,
) -> std::result::Result<EigenPair, DVector<f64>> {
    let n = h.dim();
    let budget = LANCZOS_MAX_BASIS.min(n);
    let mut q: Vec<DVector<f64>> = Vec::with_capacity(budget + 1);
    let mut alpha: Vec<f64> = Vec::with_capacity(budget);
    let mut beta: Vec<f64> = Vec::with_capacity(budget);
    let nrm = start.norm();
    if !(nrm > 0.0) {
        return Err(DVector::from_element(n, 1.0 / (n as f64).sqrt()));
    }
    q.push(start / nrm);
    let mut best = q[0].clone();

    for j in 0..budget {
        let mut w = h.mul_vec(&q[j]);
        let a = q[j].dot(&w);
        alpha.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for qi in &q {
                let c = qi.dot(&w);
                w.axpy(-c, qi, 1.0);
            }
        }
        let b = w.norm();
        let m = j + 1;
        let converged_space = b <= f64::EPSILON * abs_tol.max(1.0);
        if m % 5 == 0 || m == budget || converged_space {
            let (theta, u) = tridiagonal_min(&alpha, &beta);
            let est = b * u[m - 1].abs();
            let mut v = DVector::zeros(n);
            for (k, qk) in q.iter().enumerate().take(m) {
                v.axpy(u[k], qk, 1.0);
            }
            let vn = v.norm();
            v /= vn;
            best = v.clone();
            if est <= abs_tol || converged_space {
                let lambda = h.quad_form(&v);
                let residual = (h.mul_vec(&v) - &v * lambda).norm();
                if residual <= abs_tol {
                    let _ = theta;
                    return Ok(EigenPair {
                        lambda_min: lambda,
                        v,
                        residual,
                    });
                }
            }
        }
        if converged_space {
            // invariant subspace without a converged pair: restart elsewhere
            return Err(best);
        }
        beta.push(b);
        q.push(w / b);
    }
    Err(best)
}

/// Smallest eigenpair of the symmetric tridiagonal matrix (alpha, beta).
fn tridiagonal_min(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal");
    (
        theta,
        eig.eigenvectors.column(idx).iter().copied().collect(),
    )
}
