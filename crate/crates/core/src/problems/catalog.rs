//! Objective functions of the shipped suite.
//!
//! Indices in the formulas below are 1-based to match the usual statement of
//! each problem; the code is 0-based.

use nalgebra::DVector;

use super::Objective;
use crate::linalg::HessianBuilder;

/// Chained Rosenbrock: `Σ 100 (x_{i+1} − x_i²)² + (1 − x_i)²`.
pub struct Rosenbrock {
    pub n: usize,
    /// Multiplies the returned gradient (1.0 except for the mis-coded fixture).
    pub grad_scale: f64,
}

impl Objective for Rosenbrock {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        (0..self.n - 1)
            .map(|i| {
                let t = x[i + 1] - x[i] * x[i];
                100.0 * t * t + (1.0 - x[i]) * (1.0 - x[i])
            })
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n);
        for i in 0..self.n - 1 {
            let t = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * t * x[i] - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * t;
        }
        g * self.grad_scale
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        for i in 0..self.n - 1 {
            h.add(i, i, 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0);
            h.add(i, i + 1, -400.0 * x[i]);
            h.add(i + 1, i + 1, 200.0);
        }
    }
}

/// Broyden tridiagonal: `Σ ((3 − 2x_i) x_i − x_{i−1} − 2 x_{i+1} + 1)²`.
pub struct Broyden3d {
    pub n: usize,
}

impl Broyden3d {
    fn residual(&self, x: &DVector<f64>, i: usize) -> f64 {
        let prev = if i > 0 { x[i - 1] } else { 0.0 };
        let next = if i + 1 < self.n { x[i + 1] } else { 0.0 };
        (3.0 - 2.0 * x[i]) * x[i] - prev - 2.0 * next + 1.0
    }
}

impl Objective for Broyden3d {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        (0..self.n).map(|i| self.residual(x, i).powi(2)).sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n);
        for i in 0..self.n {
            let r = self.residual(x, i);
            g[i] += 2.0 * r * (3.0 - 4.0 * x[i]);
            if i > 0 {
                g[i - 1] -= 2.0 * r;
            }
            if i + 1 < self.n {
                g[i + 1] -= 4.0 * r;
            }
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        for i in 0..self.n {
            let r = self.residual(x, i);
            let di = 3.0 - 4.0 * x[i];
            h.add(i, i, 2.0 * (di * di - 4.0 * r));
            if i > 0 {
                h.add(i - 1, i - 1, 2.0);
                h.add(i, i - 1, -2.0 * di);
            }
            if i + 1 < self.n {
                h.add(i + 1, i + 1, 8.0);
                h.add(i, i + 1, -4.0 * di);
            }
            if i > 0 && i + 1 < self.n {
                h.add(i - 1, i + 1, 4.0);
            }
        }
    }
}

/// Dixon–Maany family, `n = 3m`.
pub struct Dixmaan {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub k: [i32; 4],
}

impl Dixmaan {
    fn w(&self, i: usize, k: i32) -> f64 {
        ((i + 1) as f64 / self.n as f64).powi(k)
    }
}

impl Objective for Dixmaan {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let (n, m) = (self.n, self.n / 3);
        let mut f = 1.0;
        for i in 0..n {
            f += self.alpha * x[i] * x[i] * self.w(i, self.k[0]);
        }
        for i in 0..n - 1 {
            let u = x[i + 1] + x[i + 1] * x[i + 1];
            f += self.beta * x[i] * x[i] * u * u * self.w(i, self.k[1]);
        }
        for i in 0..2 * m {
            f += self.gamma * x[i] * x[i] * x[i + m].powi(4) * self.w(i, self.k[2]);
        }
        for i in 0..m {
            f += self.delta * x[i] * x[i + 2 * m] * self.w(i, self.k[3]);
        }
        f
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let (n, m) = (self.n, self.n / 3);
        let mut g = DVector::zeros(n);
        for i in 0..n {
            g[i] += 2.0 * self.alpha * self.w(i, self.k[0]) * x[i];
        }
        for i in 0..n - 1 {
            let c = self.beta * self.w(i, self.k[1]);
            let y = x[i + 1];
            let u = y + y * y;
            g[i] += 2.0 * c * x[i] * u * u;
            g[i + 1] += 2.0 * c * x[i] * x[i] * u * (1.0 + 2.0 * y);
        }
        for i in 0..2 * m {
            let c = self.gamma * self.w(i, self.k[2]);
            let z = x[i + m];
            g[i] += 2.0 * c * x[i] * z.powi(4);
            g[i + m] += 4.0 * c * x[i] * x[i] * z.powi(3);
        }
        for i in 0..m {
            let c = self.delta * self.w(i, self.k[3]);
            g[i] += c * x[i + 2 * m];
            g[i + 2 * m] += c * x[i];
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        let (n, m) = (self.n, self.n / 3);
        for i in 0..n {
            h.add(i, i, 2.0 * self.alpha * self.w(i, self.k[0]));
        }
        if self.beta != 0.0 {
            for i in 0..n - 1 {
                let c = self.beta * self.w(i, self.k[1]);
                let y = x[i + 1];
                let u = y + y * y;
                let du = 1.0 + 2.0 * y;
                h.add(i, i, 2.0 * c * u * u);
                h.add(i, i + 1, 4.0 * c * x[i] * u * du);
                h.add(i + 1, i + 1, 2.0 * c * x[i] * x[i] * (du * du + 2.0 * u));
            }
        }
        for i in 0..2 * m {
            let c = self.gamma * self.w(i, self.k[2]);
            let z = x[i + m];
            h.add(i, i, 2.0 * c * z.powi(4));
            h.add(i, i + m, 8.0 * c * x[i] * z.powi(3));
            h.add(i + m, i + m, 12.0 * c * x[i] * x[i] * z * z);
        }
        for i in 0..m {
            h.add(i, i + 2 * m, self.delta * self.w(i, self.k[3]));
        }
    }
}

/// Tridiagonal quadratic: `(x_1 − 1)² + Σ_{i≥2} i (2 x_i − x_{i−1})²`.
pub struct Tridia {
    pub n: usize,
}

impl Objective for Tridia {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let mut f = (x[0] - 1.0).powi(2);
        for i in 1..self.n {
            f += (i + 1) as f64 * (2.0 * x[i] - x[i - 1]).powi(2);
        }
        f
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n);
        g[0] = 2.0 * (x[0] - 1.0);
        for i in 1..self.n {
            let c = (i + 1) as f64;
            let t = 2.0 * x[i] - x[i - 1];
            g[i] += 4.0 * c * t;
            g[i - 1] -= 2.0 * c * t;
        }
        g
    }

    fn hessian(&self, _x: &DVector<f64>, h: &mut HessianBuilder) {
        h.add(0, 0, 2.0);
        for i in 1..self.n {
            let c = (i + 1) as f64;
            h.add(i, i, 8.0 * c);
            h.add(i - 1, i - 1, 2.0 * c);
            h.add(i, i - 1, -4.0 * c);
        }
    }
}

/// Arrowhead: `Σ_{i<n} (−4 x_i + 3) + (x_i² + x_n²)²`.
pub struct Arwhead {
    pub n: usize,
}

impl Objective for Arwhead {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let xn = x[self.n - 1];
        (0..self.n - 1)
            .map(|i| {
                let q = x[i] * x[i] + xn * xn;
                -4.0 * x[i] + 3.0 + q * q
            })
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let last = self.n - 1;
        let xn = x[last];
        let mut g = DVector::zeros(self.n);
        for i in 0..last {
            let q = x[i] * x[i] + xn * xn;
            g[i] += -4.0 + 4.0 * q * x[i];
            g[last] += 4.0 * q * xn;
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        let last = self.n - 1;
        let xn = x[last];
        for i in 0..last {
            let q = x[i] * x[i] + xn * xn;
            h.add(i, i, 4.0 * q + 8.0 * x[i] * x[i]);
            h.add(last, last, 4.0 * q + 8.0 * xn * xn);
            h.add(i, last, 8.0 * x[i] * xn);
        }
    }
}

/// `(x_1 − x_2)² + Σ_{i≤n−2} (x_i + x_{i+1} + x_n)⁴ + (x_{n−1} + x_n)²`.
pub struct Nondquar {
    pub n: usize,
}

impl Objective for Nondquar {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let n = self.n;
        let mut f = (x[0] - x[1]).powi(2) + (x[n - 2] + x[n - 1]).powi(2);
        for i in 0..n - 2 {
            f += (x[i] + x[i + 1] + x[n - 1]).powi(4);
        }
        f
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut g = DVector::zeros(n);
        let d = x[0] - x[1];
        g[0] += 2.0 * d;
        g[1] -= 2.0 * d;
        let e = x[n - 2] + x[n - 1];
        g[n - 2] += 2.0 * e;
        g[n - 1] += 2.0 * e;
        for i in 0..n - 2 {
            let t3 = 4.0 * (x[i] + x[i + 1] + x[n - 1]).powi(3);
            g[i] += t3;
            g[i + 1] += t3;
            g[n - 1] += t3;
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        let n = self.n;
        h.add(0, 0, 2.0);
        h.add(1, 1, 2.0);
        h.add(0, 1, -2.0);
        h.add(n - 2, n - 2, 2.0);
        h.add(n - 1, n - 1, 2.0);
        h.add(n - 2, n - 1, 2.0);
        for i in 0..n - 2 {
            let c = 12.0 * (x[i] + x[i + 1] + x[n - 1]).powi(2);
            let idx = [i, i + 1, n - 1];
            for a in 0..3 {
                for b in 0..=a {
                    h.add(idx[a], idx[b], c);
                }
            }
        }
    }
}

/// Extended Wood function, `n = 4k`.
pub struct Woods {
    pub n: usize,
}

impl Objective for Woods {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        (0..self.n / 4)
            .map(|j| {
                let (a, b, c, d) = (x[4 * j], x[4 * j + 1], x[4 * j + 2], x[4 * j + 3]);
                100.0 * (b - a * a).powi(2)
                    + (1.0 - a).powi(2)
                    + 90.0 * (d - c * c).powi(2)
                    + (1.0 - c).powi(2)
                    + 10.1 * ((b - 1.0).powi(2) + (d - 1.0).powi(2))
                    + 19.8 * (b - 1.0) * (d - 1.0)
            })
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n);
        for j in 0..self.n / 4 {
            let k = 4 * j;
            let (a, b, c, d) = (x[k], x[k + 1], x[k + 2], x[k + 3]);
            g[k] = -400.0 * a * (b - a * a) - 2.0 * (1.0 - a);
            g[k + 1] = 200.0 * (b - a * a) + 20.2 * (b - 1.0) + 19.8 * (d - 1.0);
            g[k + 2] = -360.0 * c * (d - c * c) - 2.0 * (1.0 - c);
            g[k + 3] = 180.0 * (d - c * c) + 20.2 * (d - 1.0) + 19.8 * (b - 1.0);
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        for j in 0..self.n / 4 {
            let k = 4 * j;
            let (a, b, c, d) = (x[k], x[k + 1], x[k + 2], x[k + 3]);
            h.add(k, k, 1200.0 * a * a - 400.0 * b + 2.0);
            h.add(k, k + 1, -400.0 * a);
            h.add(k + 1, k + 1, 220.2);
            h.add(k + 2, k + 2, 1080.0 * c * c - 360.0 * d + 2.0);
            h.add(k + 2, k + 3, -360.0 * c);
            h.add(k + 3, k + 3, 200.2);
            h.add(k + 1, k + 3, 19.8);
        }
    }
}

/// `Σ_{i<n} (x_i² + x_{i+1}²)² − 4 x_i + 3`.
pub struct Engval1 {
    pub n: usize,
}

impl Objective for Engval1 {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        (0..self.n - 1)
            .map(|i| {
                let q = x[i] * x[i] + x[i + 1] * x[i + 1];
                q * q - 4.0 * x[i] + 3.0
            })
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n);
        for i in 0..self.n - 1 {
            let q = x[i] * x[i] + x[i + 1] * x[i + 1];
            g[i] += 4.0 * q * x[i] - 4.0;
            g[i + 1] += 4.0 * q * x[i + 1];
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        for i in 0..self.n - 1 {
            let q = x[i] * x[i] + x[i + 1] * x[i + 1];
            h.add(i, i, 4.0 * q + 8.0 * x[i] * x[i]);
            h.add(i + 1, i + 1, 4.0 * q + 8.0 * x[i + 1] * x[i + 1]);
            h.add(i, i + 1, 8.0 * x[i] * x[i + 1]);
        }
    }
}

/// Chained cube: `(x_1 − 1)² + Σ_{i≥2} 100 (x_i − x_{i−1}³)²`.
pub struct Cube {
    pub n: usize,
}

impl Objective for Cube {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let mut f = (x[0] - 1.0).powi(2);
        for i in 1..self.n {
            f += 100.0 * (x[i] - x[i - 1].powi(3)).powi(2);
        }
        f
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n);
        g[0] = 2.0 * (x[0] - 1.0);
        for i in 1..self.n {
            let p = x[i - 1];
            let t = x[i] - p * p * p;
            g[i] += 200.0 * t;
            g[i - 1] -= 600.0 * t * p * p;
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        h.add(0, 0, 2.0);
        for i in 1..self.n {
            let p = x[i - 1];
            let t = x[i] - p * p * p;
            h.add(i, i, 200.0);
            h.add(i - 1, i - 1, 1800.0 * p.powi(4) - 1200.0 * t * p);
            h.add(i, i - 1, -600.0 * p * p);
        }
    }
}

/// `Σ_{i<n} sin(x_1 + x_i² − 1) + ½ sin(x_n²)`.
pub struct Eg2 {
    pub n: usize,
}

impl Objective for Eg2 {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let last = self.n - 1;
        let mut f = 0.5 * (x[last] * x[last]).sin();
        for i in 0..last {
            f += (x[0] + x[i] * x[i] - 1.0).sin();
        }
        f
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let last = self.n - 1;
        let mut g = DVector::zeros(self.n);
        for i in 0..last {
            let c = (x[0] + x[i] * x[i] - 1.0).cos();
            g[0] += c;
            g[i] += 2.0 * x[i] * c;
        }
        let z = x[last] * x[last];
        g[last] += x[last] * z.cos();
        g
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        let last = self.n - 1;
        for i in 0..last {
            let u = x[0] + x[i] * x[i] - 1.0;
            let (s, c) = u.sin_cos();
            if i == 0 {
                let du = 1.0 + 2.0 * x[0];
                h.add(0, 0, -s * du * du + 2.0 * c);
            } else {
                h.add(0, 0, -s);
                h.add(i, i, -4.0 * x[i] * x[i] * s + 2.0 * c);
                h.add(0, i, -2.0 * x[i] * s);
            }
        }
        let z = x[last] * x[last];
        h.add(last, last, z.cos() - 2.0 * z * z.sin());
    }
}

/// `Σ (x_i − i)⁴`.
pub struct Dqrtic {
    pub n: usize,
}

impl Objective for Dqrtic {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        (0..self.n).map(|i| (x[i] - (i + 1) as f64).powi(4)).sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| 4.0 * (x[i] - (i + 1) as f64).powi(3))
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        for i in 0..self.n {
            h.add(i, i, 12.0 * (x[i] - (i + 1) as f64).powi(2));
        }
    }
}

/// Curly function with window 10: `Σ_i Q(Σ_{j=i}^{min(i+10,n)} x_j)`,
/// `Q(s) = s⁴ − 20 s² − 0.1 s`.
pub struct Curly {
    pub n: usize,
    pub k: usize,
}

impl Curly {
    fn window(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        i..=(i + self.k).min(self.n - 1)
    }

    fn sum(&self, x: &DVector<f64>, i: usize) -> f64 {
        self.window(i).map(|j| x[j]).sum()
    }
}

impl Objective for Curly {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        (0..self.n)
            .map(|i| {
                let s = self.sum(x, i);
                s * (s * (s * s - 20.0) - 0.1)
            })
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n);
        for i in 0..self.n {
            let s = self.sum(x, i);
            let d = 4.0 * s * s * s - 40.0 * s - 0.1;
            for j in self.window(i) {
                g[j] += d;
            }
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder) {
        for i in 0..self.n {
            let s = self.sum(x, i);
            let c = 12.0 * s * s - 40.0;
            for a in self.window(i) {
                for b in i..=a {
                    h.add(a, b, c);
                }
            }
        }
    }
}

/// Diagonal quadratic `½ Σ d_i x_i²`.
pub struct DiagQuadratic {
    pub d: Vec<f64>,
}

impl Objective for DiagQuadratic {
    fn dim(&self) -> usize {
        self.d.len()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * self
            .d
            .iter()
            .zip(x.iter())
            .map(|(d, v)| d * v * v)
            .sum::<f64>()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.d.len(), |i, _| self.d[i] * x[i])
    }

    fn hessian(&self, _x: &DVector<f64>, h: &mut HessianBuilder) {
        for (i, &d) in self.d.iter().enumerate() {
            h.add(i, i, d);
        }
    }
}
