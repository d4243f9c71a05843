//! Envelope (skyline) Cholesky factorization of `H + mu I`.
//!
//! Row `i` of the factor is stored from its first structurally nonzero column
//! up to the diagonal. Dense matrices use a full envelope; sparse matrices use
//! the envelope of their natural ordering, which is tight for the banded and
//! arrowhead patterns of the shipped problems.

use nalgebra::DVector;

use super::SymMatrix;
use crate::error::{Error, Result};

/// Lower-triangular factor `L` with `L Lᵀ = H + mu I`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    first: Vec<usize>,
    offset: Vec<usize>,
    data: Vec<f64>,
    shift: f64,
}

/// Result of probing `H + mu I` for positive definiteness.
#[derive(Debug, Clone)]
pub enum FactorizationOutcome {
    PositiveDefinite(CholeskyFactor),
    /// Factorization broke down at `pivot` with a nonpositive value.
    Indefinite {
        pivot: usize,
        value: f64,
    },
}

impl FactorizationOutcome {
    pub fn is_positive_definite(&self) -> bool {
        matches!(self, FactorizationOutcome::PositiveDefinite(_))
    }

    pub fn factor(&self) -> Option<&CholeskyFactor> {
        match self {
            FactorizationOutcome::PositiveDefinite(f) => Some(f),
            FactorizationOutcome::Indefinite { .. } => None,
        }
    }

    pub fn into_factor(self) -> Option<CholeskyFactor> {
        match self {
            FactorizationOutcome::PositiveDefinite(f) => Some(f),
            FactorizationOutcome::Indefinite { .. } => None,
        }
    }
}

/// Factorizes `H + mu I`; positive definite iff every pivot is strictly positive.
pub fn probe_spd(h: &SymMatrix, mu: f64) -> Result<FactorizationOutcome> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::NonFinite(format!(
            "shift {mu} must be finite and nonnegative"
        )));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite("Hessian has non-finite entries".into()));
    }
    let n = h.dim();
    let first: Vec<usize> = match h {
        SymMatrix::Dense(_) => vec![0; n],
        SymMatrix::Sparse(s) => (0..n).map(|i| s.first_col(i)).collect(),
    };
    let mut offset = Vec::with_capacity(n + 1);
    offset.push(0);
    for i in 0..n {
        offset.push(offset[i] + (i - first[i] + 1));
    }
    let mut data = vec![0.0; offset[n]];
    match h {
        SymMatrix::Dense(m) => {
            for i in 0..n {
                for j in 0..=i {
                    data[offset[i] + j] = m[(i, j)];
                }
            }
        }
        SymMatrix::Sparse(s) => {
            for i in 0..n {
                for (j, v) in s.row(i) {
                    if j <= i {
                        data[offset[i] + j - first[i]] = v;
                    }
                }
            }
        }
    }
    for i in 0..n {
        data[offset[i] + i - first[i]] += mu;
    }

    for i in 0..n {
        let fi = first[i];
        for j in fi..i {
            let fj = first[j];
            let start = fi.max(fj);
            let mut acc = data[offset[i] + j - fi];
            for k in start..j {
                acc -= data[offset[i] + k - fi] * data[offset[j] + k - fj];
            }
            data[offset[i] + j - fi] = acc / data[offset[j] + j - fj];
        }
        let mut d = data[offset[i] + i - fi];
        for k in fi..i {
            let l = data[offset[i] + k - fi];
            d -= l * l;
        }
        if !(d > 0.0) {
            return Ok(FactorizationOutcome::Indefinite { pivot: i, value: d });
        }
        data[offset[i] + i - fi] = d.sqrt();
    }
    Ok(FactorizationOutcome::PositiveDefinite(CholeskyFactor {
        n,
        first,
        offset,
        data,
        shift: mu,
    }))
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    fn l(&self, i: usize, j: usize) -> f64 {
        self.data[self.offset[i] + j - self.first[i]]
    }

    /// Solves `L Lᵀ x = b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut y = b.clone();
        for i in 0..n {
            let mut acc = y[i];
            for k in self.first[i]..i {
                acc -= self.l(i, k) * y[k];
            }
            y[i] = acc / self.l(i, i);
        }
        for i in (0..n).rev() {
            y[i] /= self.l(i, i);
            let xi = y[i];
            for k in self.first[i]..i {
                y[k] -= self.l(i, k) * xi;
            }
        }
        y
    }

    /// Smallest pivot `L_ii`; squared it bounds how close the shifted matrix is to singular.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|i| self.l(i, i))
            .fold(f64::INFINITY, f64::min)
    }
}
