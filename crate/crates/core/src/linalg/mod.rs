//! Symmetric linear algebra used by the step computations.
//!
//! Matrices up to [`DENSE_LIMIT`] rows are stored densely; larger ones use a
//! compressed sparse row layout holding both triangles. Every routine accepts
//! either representation through [`SymMatrix`].

mod cg;
mod cholesky;
mod eigen;
mod solve;
mod sparse;

use nalgebra::{DMatrix, DVector};

pub use cg::conjugate_gradient;
pub use cholesky::{probe_spd, CholeskyFactor, FactorizationOutcome};
pub use eigen::{dense_min_eigenpair, lanczos_min_eigenpair, min_eigenpair, EigenPair};
pub use solve::{regularized_solve, solve_with_factor, LinearSolver, SolveResult};
pub use sparse::SparseSym;

use crate::error::{Error, Result};

/// Largest dimension stored as a dense matrix.
pub const DENSE_LIMIT: usize = 200;

/// Symmetric matrix in dense or sparse storage.
#[derive(Debug, Clone, PartialEq)]
pub enum SymMatrix {
    Dense(DMatrix<f64>),
    Sparse(SparseSym),
}

impl SymMatrix {
    pub fn dim(&self) -> usize {
        match self {
            SymMatrix::Dense(m) => m.nrows(),
            SymMatrix::Sparse(s) => s.dim(),
        }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut b = HessianBuilder::new(n);
        for (i, &v) in d.iter().enumerate() {
            b.add(i, i, v);
        }
        b.build()
    }

    /// Builds a dense symmetric matrix, checking exact symmetry.
    pub fn dense(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        for i in 0..m.nrows() {
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::Contract(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(SymMatrix::Dense(m))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            SymMatrix::Dense(m) => m[(i, j)],
            SymMatrix::Sparse(s) => s.get(i, j),
        }
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            SymMatrix::Dense(m) => m * x,
            SymMatrix::Sparse(s) => s.mul_vec(x),
        }
    }

    /// `xᵀ H x`.
    pub fn quad_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&self.mul_vec(x))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        match self {
            SymMatrix::Dense(m) => m
                .row_iter()
                .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            SymMatrix::Sparse(s) => s.norm_inf(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            SymMatrix::Dense(m) => m.iter().all(|v| v.is_finite()),
            SymMatrix::Sparse(s) => s.values().iter().all(|v| v.is_finite()),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            SymMatrix::Dense(m) => (0..m.nrows()).all(|i| (0..i).all(|j| m[(i, j)] == m[(j, i)])),
            SymMatrix::Sparse(s) => s.is_symmetric(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            SymMatrix::Dense(m) => m.clone(),
            SymMatrix::Sparse(s) => s.to_dense(),
        }
    }

    /// Residual `(H + mu I) s + g` accumulated with compensated arithmetic.
    pub fn shifted_residual(&self, mu: f64, s: &DVector<f64>, g: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut r = DVector::zeros(n);
        match self {
            SymMatrix::Dense(m) => {
                for i in 0..n {
                    let mut acc = CompensatedSum::new();
                    for j in 0..n {
                        acc.add_product(m[(i, j)], s[j]);
                    }
                    acc.add_product(mu, s[i]);
                    acc.add(g[i]);
                    r[i] = acc.value();
                }
            }
            SymMatrix::Sparse(sp) => {
                for i in 0..n {
                    let mut acc = CompensatedSum::new();
                    for (j, v) in sp.row(i) {
                        acc.add_product(v, s[j]);
                    }
                    acc.add_product(mu, s[i]);
                    acc.add(g[i]);
                    r[i] = acc.value();
                }
            }
        }
        r
    }

    /// Quadratic model change `gᵀs + ½ sᵀHs`, accumulated with compensated
    /// arithmetic so that small decreases keep their sign.
    pub fn model_change(&self, g: &DVector<f64>, s: &DVector<f64>) -> f64 {
        let hs = self.mul_vec(s);
        let mut acc = CompensatedSum::new();
        for i in 0..s.len() {
            acc.add_product(g[i], s[i]);
            acc.add_product(0.5 * hs[i], s[i]);
        }
        acc.value()
    }
}

/// Accumulates symmetric entries `(i, j)` and produces a [`SymMatrix`] whose
/// two triangles hold bitwise-identical values.
#[derive(Debug, Clone)]
pub struct HessianBuilder {
    n: usize,
    storage: BuilderStorage,
}

#[derive(Debug, Clone)]
enum BuilderStorage {
    Dense(DMatrix<f64>),
    Sparse(std::collections::BTreeMap<(usize, usize), f64>),
}

impl HessianBuilder {
    /// Picks dense storage for `n <= DENSE_LIMIT`, sparse above.
    pub fn new(n: usize) -> Self {
        if n <= DENSE_LIMIT {
            Self::new_dense(n)
        } else {
            Self::new_sparse(n)
        }
    }

    pub fn new_dense(n: usize) -> Self {
        Self {
            n,
            storage: BuilderStorage::Dense(DMatrix::zeros(n, n)),
        }
    }

    pub fn new_sparse(n: usize) -> Self {
        Self {
            n,
            storage: BuilderStorage::Sparse(Default::default()),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `v` to entry `(i, j)` and, implicitly, to `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        match &mut self.storage {
            BuilderStorage::Dense(m) => m[(r, c)] += v,
            BuilderStorage::Sparse(map) => *map.entry((r, c)).or_insert(0.0) += v,
        }
    }

    pub fn build(self) -> SymMatrix {
        match self.storage {
            BuilderStorage::Dense(mut m) => {
                for i in 0..self.n {
                    for j in 0..i {
                        m[(j, i)] = m[(i, j)];
                    }
                }
                SymMatrix::Dense(m)
            }
            BuilderStorage::Sparse(map) => SymMatrix::Sparse(SparseSym::from_lower(self.n, map)),
        }
    }
}

/// Compensated summation of sums and products (error-free transformations).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    err: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, v: f64) {
        let s = self.sum + v;
        let bp = s - self.sum;
        self.err += (self.sum - (s - bp)) + (v - bp);
        self.sum = s;
    }

    pub(crate) fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let e = a.mul_add(b, -p);
        self.add(p);
        self.err += e;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.err
    }
}

pub(crate) fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}
