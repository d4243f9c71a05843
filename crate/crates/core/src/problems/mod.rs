//! Unconstrained test problems with analytic derivatives.
//!
//! Problems are immutable; evaluation is pure and evaluation counters live
//! with the caller in [`Counters`].

mod catalog;
mod check;
mod registry;

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use check::{
    check_derivatives, check_problem, DerivativeReport, GRAD_TOLERANCE, HESS_TOLERANCE,
};
pub use registry::{list, lookup, parse_spec, registry_json, suite, RegistryEntry, SuiteTier};

use crate::error::{Error, Result};
use crate::linalg::{HessianBuilder, SymMatrix};

/// A smooth objective with analytic first and second derivatives.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Adds the Hessian entries into `h`; each unordered pair is added once.
    fn hessian(&self, x: &DVector<f64>, h: &mut HessianBuilder);
}

/// A named objective with its standard starting point.
#[derive(Clone)]
pub struct Problem {
    name: String,
    x0: DVector<f64>,
    convex: bool,
    hessian_lipschitz: Option<f64>,
    objective: Arc<dyn Objective>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("n", &self.dim())
            .field("convex", &self.convex)
            .field("hessian_lipschitz", &self.hessian_lipschitz)
            .finish()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        x0: DVector<f64>,
        objective: Arc<dyn Objective>,
    ) -> Result<Self> {
        if x0.len() != objective.dim() {
            return Err(Error::DimensionMismatch {
                expected: objective.dim(),
                got: x0.len(),
            });
        }
        if objective.dim() == 0 {
            return Err(Error::InvalidDimension {
                name: name.into(),
                reason: "n must be positive".into(),
            });
        }
        Ok(Self {
            name: name.into(),
            x0,
            convex: false,
            hessian_lipschitz: None,
            objective,
        })
    }

    pub fn with_convex(mut self, convex: bool) -> Self {
        self.convex = convex;
        self
    }

    pub fn with_hessian_lipschitz(mut self, lh: Option<f64>) -> Self {
        self.hessian_lipschitz = lh;
        self
    }

    /// Replaces the starting point, e.g. for randomized starts.
    pub fn with_start(mut self, x0: DVector<f64>) -> Result<Self> {
        if x0.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x0.len(),
            });
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    pub fn convex(&self) -> bool {
        self.convex
    }

    /// Known Hessian Lipschitz constant, if any (0 for quadratics).
    pub fn hessian_lipschitz(&self) -> Option<f64> {
        self.hessian_lipschitz
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.objective.value(x)
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.objective.gradient(x)
    }

    pub fn hessian(&self, x: &DVector<f64>) -> SymMatrix {
        let mut b = HessianBuilder::new(self.dim());
        self.objective.hessian(x, &mut b);
        b.build()
    }
}

/// Requested derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Value = 0,
    Gradient = 1,
    Hessian = 2,
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Order::Value),
            1 => Ok(Order::Gradient),
            2 => Ok(Order::Hessian),
            _ => Err(Error::Contract(format!(
                "derivative order {v} not in 0..=2"
            ))),
        }
    }
}

/// Derivatives returned by [`evaluate`]. Non-finite results are tagged, not raised.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub f: f64,
    pub g: Option<DVector<f64>>,
    pub h: Option<SymMatrix>,
}

impl Evaluation {
    pub fn is_finite(&self) -> bool {
        self.f.is_finite()
            && self
                .g
                .as_ref()
                .is_none_or(|g| g.iter().all(|v| v.is_finite()))
            && self.h.as_ref().is_none_or(|h| h.is_finite())
    }
}

/// Work counters for a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub f_evals: usize,
    pub g_evals: usize,
    #[serde(rename = "H_evals")]
    pub h_evals: usize,
    pub factorizations: usize,
    pub eigen_solves: usize,
}

/// Evaluates `f` and every derivative up to `order` at `x`, counting one
/// evaluation per order returned.
pub fn evaluate(
    problem: &Problem,
    x: &DVector<f64>,
    order: Order,
    counters: &mut Counters,
) -> Result<Evaluation> {
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            got: x.len(),
        });
    }
    let f = problem.value(x);
    counters.f_evals += 1;
    let g = (order >= Order::Gradient).then(|| {
        counters.g_evals += 1;
        problem.gradient(x)
    });
    let h = (order >= Order::Hessian).then(|| {
        counters.h_evals += 1;
        problem.hessian(x)
    });
    Ok(Evaluation { f, g, h })
}
