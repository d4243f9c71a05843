//! Name-addressable problem registry (`"rosenbr:100"`, case-insensitive).

use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;

use super::catalog::*;
use super::{Objective, Problem};
use crate::error::{Error, Result};

/// Problem size tier of the benchmark suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteTier {
    Small,
    Medium,
}

/// Static description of a registered problem family.
#[derive(Debug, Clone, Serialize)]
pub struct RegistryEntry {
    pub name: &'static str,
    pub default_n: usize,
    pub medium_n: usize,
    pub convex: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hessian_lipschitz: Option<f64>,
    /// Member of the shipped benchmark suite (fixtures are not).
    pub in_suite: bool,
    /// Conventional starting point, as a short description.
    pub start: &'static str,
    #[serde(skip)]
    dims: DimRule,
    #[serde(skip)]
    build: fn(usize) -> Arc<dyn Objective>,
    #[serde(skip)]
    x0: fn(usize) -> Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
enum DimRule {
    AtLeast(usize),
    MultipleOf(usize),
    Fixed(usize),
}

impl DimRule {
    fn check(self, name: &str, n: usize) -> Result<()> {
        let ok = match self {
            DimRule::AtLeast(m) => n >= m,
            DimRule::MultipleOf(k) => n >= k && n.is_multiple_of(k),
            DimRule::Fixed(m) => n == m,
        };
        if ok {
            Ok(())
        } else {
            let reason = match self {
                DimRule::AtLeast(m) => format!("n = {n} but at least {m} required"),
                DimRule::MultipleOf(k) => format!("n = {n} is not a positive multiple of {k}"),
                DimRule::Fixed(m) => format!("n = {n} but the problem has fixed dimension {m}"),
            };
            Err(Error::InvalidDimension {
                name: name.to_string(),
                reason,
            })
        }
    }
}

fn alternating(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i % 2 == 0 { a } else { b }).collect()
}

fn start_rosenbrock(n: usize) -> Vec<f64> {
    alternating(-1.2, 1.0, n)
}

fn start_plus_minus(n: usize) -> Vec<f64> {
    alternating(1.0, -1.0, n)
}

fn start_woods(n: usize) -> Vec<f64> {
    alternating(-3.0, -1.0, n)
}

fn dixmaan(n: usize, beta: f64, gamma: f64, delta: f64, k: [i32; 4]) -> Arc<dyn Objective> {
    Arc::new(Dixmaan {
        n,
        alpha: 1.0,
        beta,
        gamma,
        delta,
        k,
    })
}

fn illquad_diag(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 10f64.powf(6.0 * i as f64 / (n - 1) as f64))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn e(
    name: &'static str,
    default_n: usize,
    medium_n: usize,
    convex: bool,
    hessian_lipschitz: Option<f64>,
    in_suite: bool,
    start: &'static str,
    dims: DimRule,
    build: fn(usize) -> Arc<dyn Objective>,
    x0: fn(usize) -> Vec<f64>,
) -> RegistryEntry {
    RegistryEntry {
        name,
        default_n,
        medium_n,
        convex,
        hessian_lipschitz,
        in_suite,
        start,
        dims,
        build,
        x0,
    }
}

fn entries() -> Vec<RegistryEntry> {
    use DimRule::*;
    vec![
        e(
            "rosenbr",
            10,
            100,
            false,
            None,
            true,
            "(-1.2, 1, -1.2, 1, ...)",
            AtLeast(2),
            |n| Arc::new(Rosenbrock { n, grad_scale: 1.0 }),
            start_rosenbrock,
        ),
        e(
            "broyden3d",
            10,
            500,
            false,
            None,
            true,
            "all -1",
            AtLeast(1),
            |n| Arc::new(Broyden3d { n }),
            |n| vec![-1.0; n],
        ),
        e(
            "dixmaana",
            12,
            600,
            false,
            None,
            true,
            "all 2",
            MultipleOf(3),
            |n| dixmaan(n, 0.0, 0.125, 0.125, [0, 0, 0, 0]),
            |n| vec![2.0; n],
        ),
        e(
            "dixmaane",
            12,
            600,
            false,
            None,
            true,
            "all 2",
            MultipleOf(3),
            |n| dixmaan(n, 0.0, 0.125, 0.125, [1, 0, 0, 1]),
            |n| vec![2.0; n],
        ),
        e(
            "dixmaani",
            12,
            600,
            false,
            None,
            true,
            "all 2",
            MultipleOf(3),
            |n| dixmaan(n, 0.0, 0.125, 0.125, [2, 0, 0, 2]),
            |n| vec![2.0; n],
        ),
        e(
            "dixmaanl",
            12,
            600,
            false,
            None,
            true,
            "all 2",
            MultipleOf(3),
            |n| dixmaan(n, 0.26, 0.26, 0.26, [2, 0, 0, 2]),
            |n| vec![2.0; n],
        ),
        e(
            "tridia",
            10,
            500,
            true,
            Some(0.0),
            true,
            "all 1",
            AtLeast(2),
            |n| Arc::new(Tridia { n }),
            |n| vec![1.0; n],
        ),
        e(
            "arwhead",
            10,
            500,
            true,
            None,
            true,
            "all 1",
            AtLeast(2),
            |n| Arc::new(Arwhead { n }),
            |n| vec![1.0; n],
        ),
        e(
            "nondquar",
            10,
            500,
            true,
            None,
            true,
            "(1, -1, 1, -1, ...)",
            AtLeast(3),
            |n| Arc::new(Nondquar { n }),
            start_plus_minus,
        ),
        e(
            "woods",
            12,
            500,
            false,
            None,
            true,
            "(-3, -1, -3, -1, ...)",
            MultipleOf(4),
            |n| Arc::new(Woods { n }),
            start_woods,
        ),
        e(
            "engval1",
            10,
            500,
            true,
            None,
            true,
            "all 2",
            AtLeast(2),
            |n| Arc::new(Engval1 { n }),
            |n| vec![2.0; n],
        ),
        e(
            "cube",
            10,
            500,
            false,
            None,
            true,
            "(-1.2, 1, -1.2, 1, ...)",
            AtLeast(2),
            |n| Arc::new(Cube { n }),
            start_rosenbrock,
        ),
        e(
            "eg2",
            10,
            400,
            false,
            None,
            true,
            "all 0",
            AtLeast(2),
            |n| Arc::new(Eg2 { n }),
            |n| vec![0.0; n],
        ),
        e(
            "dqrtic",
            10,
            500,
            true,
            None,
            true,
            "all 2",
            AtLeast(1),
            |n| Arc::new(Dqrtic { n }),
            |n| vec![2.0; n],
        ),
        e(
            "curly10",
            10,
            500,
            false,
            None,
            true,
            "x_i = 1e-4 i/(n+1)",
            AtLeast(1),
            |n| Arc::new(Curly { n, k: 10 }),
            |n| {
                (1..=n)
                    .map(|i| 1e-4 * i as f64 / (n as f64 + 1.0))
                    .collect()
            },
        ),
        e(
            "diagquad",
            10,
            500,
            true,
            Some(0.0),
            true,
            "all 1",
            AtLeast(1),
            |n| {
                Arc::new(DiagQuadratic {
                    d: (1..=n).map(|i| i as f64).collect(),
                })
            },
            |n| vec![1.0; n],
        ),
        e(
            "illquad",
            10,
            500,
            true,
            Some(0.0),
            true,
            "all 1",
            AtLeast(2),
            |n| Arc::new(DiagQuadratic { d: illquad_diag(n) }),
            |n| vec![1.0; n],
        ),
        // fixtures, not part of the benchmark suite
        e(
            "quadratic",
            10,
            500,
            true,
            Some(0.0),
            false,
            "all 1",
            AtLeast(1),
            |n| Arc::new(DiagQuadratic { d: vec![1.0; n] }),
            |n| vec![1.0; n],
        ),
        e(
            "saddle2",
            2,
            2,
            false,
            Some(0.0),
            false,
            "origin (exact saddle)",
            Fixed(2),
            |_| Arc::new(DiagQuadratic { d: vec![2.0, -2.0] }),
            |n| vec![0.0; n],
        ),
        e(
            "saddle4",
            4,
            4,
            false,
            Some(0.0),
            false,
            "origin (exact saddle)",
            Fixed(4),
            |_| {
                Arc::new(DiagQuadratic {
                    d: vec![1.0, 3.0, -2.0, -0.5],
                })
            },
            |n| vec![0.0; n],
        ),
        e(
            "badgrad-fixture",
            2,
            2,
            false,
            None,
            false,
            "(-1.2, 1)",
            AtLeast(2),
            |n| {
                Arc::new(Rosenbrock {
                    n,
                    grad_scale: 1.01,
                })
            },
            start_rosenbrock,
        ),
    ]
}

/// All registered problems, suite members first.
pub fn list() -> Vec<RegistryEntry> {
    entries()
}

/// JSON listing: `[{name, default_n, convex, hessian_lipschitz?, ...}]`.
pub fn registry_json() -> String {
    serde_json::to_string_pretty(&entries()).expect("registry serializes")
}

/// Splits `"name[:n]"` into a lower-cased name and optional dimension.
pub fn parse_spec(spec: &str) -> Result<(String, Option<usize>)> {
    let spec = spec.trim();
    let (name, n) = match spec.split_once(':') {
        Some((name, n)) => {
            let n = n
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::UnknownProblem(spec.to_string()))?;
            (name, Some(n))
        }
        None => (spec, None),
    };
    Ok((name.trim().to_ascii_lowercase(), n))
}

/// Resolves `"name[:n]"` to a problem instance.
pub fn lookup(spec: &str) -> Result<Problem> {
    let (name, n) = parse_spec(spec)?;
    let entry = entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownProblem(spec.to_string()))?;
    let n = n.unwrap_or(entry.default_n);
    entry.instantiate(n)
}

impl RegistryEntry {
    pub fn instantiate(&self, n: usize) -> Result<Problem> {
        self.dims.check(self.name, n)?;
        let label = format!("{}:{}", self.name, n);
        Ok(
            Problem::new(label, DVector::from_vec((self.x0)(n)), (self.build)(n))?
                .with_convex(self.convex)
                .with_hessian_lipschitz(self.hessian_lipschitz),
        )
    }
}

/// The shipped benchmark suite at the given tier.
pub fn suite(tier: SuiteTier) -> Vec<Problem> {
    entries()
        .into_iter()
        .filter(|e| e.in_suite)
        .map(|e| {
            let n = match tier {
                SuiteTier::Small => e.default_n,
                SuiteTier::Medium => e.medium_n,
            };
            e.instantiate(n).expect("suite dimensions are valid")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_insensitive_lookup() {
        let p = lookup("ROSENBR:100").unwrap();
        assert_eq!(p.dim(), 100);
        assert_eq!(p.name(), "rosenbr:100");
        assert_eq!(lookup("Dixmaana").unwrap().dim(), 12);
    }

    #[test]
    fn bad_specs() {
        assert!(matches!(lookup("nosuch"), Err(Error::UnknownProblem(_))));
        assert!(matches!(lookup("rosenbr:x"), Err(Error::UnknownProblem(_))));
        assert!(matches!(
            lookup("dixmaana:10"),
            Err(Error::InvalidDimension { .. })
        ));
        assert!(matches!(
            lookup("woods:6"),
            Err(Error::InvalidDimension { .. })
        ));
        assert!(matches!(
            lookup("saddle2:3"),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn suite_shape() {
        let s = suite(SuiteTier::Small);
        assert_eq!(s.len(), 17);
        let quads: Vec<_> = s
            .iter()
            .filter(|p| p.hessian_lipschitz() == Some(0.0))
            .collect();
        assert!(quads.len() >= 2);
        for p in &s {
            assert!(p.value(p.x0()).is_finite(), "{}", p.name());
        }
    }

    #[test]
    fn json_listing_fields() {
        let v: serde_json::Value = serde_json::from_str(&registry_json()).unwrap();
        let first = &v.as_array().unwrap()[0];
        assert_eq!(first["name"], "rosenbr");
        assert_eq!(first["default_n"], 10);
        assert_eq!(first["convex"], false);
        assert!(first.get("hessian_lipschitz").is_none());
        let tri = v
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["name"] == "tridia")
            .unwrap();
        assert_eq!(tri["hessian_lipschitz"], 0.0);
    }
}
