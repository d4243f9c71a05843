use nalgebra::DVector;

use super::SymMatrix;

/// Conjugate gradients on `(H + mu I) s = -g` from `s = 0`.
///
/// Stops once `accept(‖r‖, ‖s‖, ‖g‖)` holds for the recurrence residual, on
/// breakdown (`pᵀAp <= 0`), or after `budget` iterations. Returns the iterate
/// and the iteration count; the caller recomputes the true residual.
pub fn conjugate_gradient<F>(
    h: &SymMatrix,
    mu: f64,
    g: &DVector<f64>,
    accept: &F,
    budget: usize,
) -> (DVector<f64>, usize)
where
    F: Fn(f64, f64, f64) -> bool,
{
    let n = g.len();
    let g_norm = g.norm();
    let mut s = DVector::zeros(n);
    // r = A s + g
    let mut r = g.clone();
    let mut p = -&r;
    let mut rr = r.dot(&r);
    for it in 0..budget {
        if accept(rr.sqrt(), s.norm(), g_norm) && it > 0 {
            return (s, it);
        }
        let ap = h.mul_vec(&p) + &p * mu;
        let curv = p.dot(&ap);
        if !(curv > 0.0) {
            return (s, it);
        }
        let alpha = rr / curv;
        s.axpy(alpha, &p, 1.0);
        r.axpy(alpha, &ap, 1.0);
        let rr_new = r.dot(&r);
        if rr_new == 0.0 {
            return (s, it + 1);
        }
        let beta = rr_new / rr;
        p = &p * beta - &r;
        rr = rr_new;
    }
    (s, budget)
}
