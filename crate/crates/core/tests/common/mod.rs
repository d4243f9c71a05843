//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{Cholesky, DMatrix, DVector};
use negcurv::bench::BenchResult;
use negcurv::linalg::SymMatrix;
use rand::Rng;

/// Random orthogonal matrix from the QR factor of a Gaussian-like matrix.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

/// `Q diag(lambda) Qᵀ`, symmetrized exactly.
pub fn with_spectrum<R: Rng>(lambda: &[f64], rng: &mut R) -> SymMatrix {
    let n = lambda.len();
    let q = random_orthogonal(n, rng);
    let m = &q * DMatrix::from_diagonal(&DVector::from_column_slice(lambda)) * q.transpose();
    let m = DMatrix::from_fn(n, n, |i, j| if i >= j { m[(i, j)] } else { m[(j, i)] });
    SymMatrix::dense(m).expect("symmetric by construction")
}

/// `λmin(H) > −shift`, decided by a plain Cholesky attempt on `H + shift I`.
pub fn min_eig_above(h: &SymMatrix, shift: f64) -> bool {
    let n = h.dim();
    Cholesky::new(h.to_dense() + DMatrix::identity(n, n) * shift).is_some()
}

/// `‖(H + μI)s + g‖` by a plain dense product.
pub fn dense_residual(h: &SymMatrix, mu: f64, s: &DVector<f64>, g: &DVector<f64>) -> f64 {
    (h.to_dense() * s + s * mu + g).norm()
}

/// Per-algorithm performance ratios over problems solved by some algorithm.
fn ratios(results: &[BenchResult], algo: &str) -> (Vec<f64>, usize) {
    let mut problems: Vec<&str> = results.iter().map(|r| r.problem.as_str()).collect();
    problems.sort();
    problems.dedup();
    let mut out = Vec::new();
    let mut denom = 0;
    for p in problems {
        let solved: Vec<&BenchResult> = results
            .iter()
            .filter(|r| r.problem == p && r.success)
            .collect();
        let Some(best) = solved.iter().filter_map(|r| r.iterations).min() else {
            continue;
        };
        denom += 1;
        if let Some(r) = solved.iter().find(|r| r.algo == algo) {
            out.push(r.iterations.unwrap() as f64 / best.max(1) as f64);
        }
    }
    (out, denom)
}

/// Brute-force profile value at `tau`.
pub fn brute_fraction(results: &[BenchResult], algo: &str, tau: f64) -> f64 {
    let (r, denom) = ratios(results, algo);
    if denom == 0 {
        return 0.0;
    }
    r.iter().filter(|&&x| x <= tau).count() as f64 / denom as f64
}

/// `(1/10) ∫₁¹⁰ fraction` written as a sum over problems:
/// each problem with ratio `r` contributes `max(0, 10 − r) / N`.
pub fn brute_pi(results: &[BenchResult], algo: &str) -> f64 {
    let (r, denom) = ratios(results, algo);
    if denom == 0 {
        return 0.0;
    }
    r.iter().map(|&x| (10.0 - x.max(1.0)).max(0.0)).sum::<f64>() / denom as f64 / 10.0
}
