mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use negcurv::bench::{performance_profile, pi_statistic, BenchResult};
use negcurv::linalg::{min_eigenpair, probe_spd, regularized_solve, LinearSolver, SymMatrix};
use negcurv::problems::{list, Counters};
use negcurv::solver::update_sigma;
use negcurv::step::{
    bound_violation, eigen_newton_step, second_order_step, try_convex_step, ConvexAttempt,
};
use negcurv::SolverConfig;

fn spectrum(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n)
}

fn matrix(lambda: &[f64], seed: u64) -> SymMatrix {
    common::with_spectrum(lambda, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn vector(n: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-5.0..5.0f64, n).prop_map(DVector::from_vec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probe_matches_spectrum(lambda in spectrum(20), mu in 0.0..12.0f64, seed: u64) {
        let shifted_min = lambda.iter().cloned().fold(f64::INFINITY, f64::min) + mu;
        prop_assume!(shifted_min.abs() > 1e-6);
        let h = matrix(&lambda, seed);
        let out = probe_spd(&h, mu).unwrap();
        prop_assert_eq!(out.is_positive_definite(), shifted_min > 0.0);
        prop_assert_eq!(out.is_positive_definite(), common::min_eig_above(&h, mu));
    }

    #[test]
    fn min_eigenvalue_accuracy(lambda in spectrum(30), seed: u64) {
        let h = matrix(&lambda, seed);
        let want = lambda.iter().cloned().fold(f64::INFINITY, f64::min);
        let eig = min_eigenpair(&h, 1e-10).unwrap();
        prop_assert!((eig.lambda_min - want).abs() <= 1e-8 * h.norm_inf().max(1.0), "{} vs {}", eig.lambda_min, want);
        prop_assert!((eig.v.norm() - 1.0).abs() < 1e-12);
        let r = (h.to_dense() * &eig.v - &eig.v * eig.lambda_min).norm();
        prop_assert!(r <= 1e-8 * h.norm_inf().max(1.0));
    }

    #[test]
    fn solve_residual_is_recomputable(lambda in spectrum(15), g in vector(15), seed: u64, backend in prop_oneof![Just(LinearSolver::Direct), Just(LinearSolver::Cg)]) {
        let h = matrix(&lambda, seed);
        let mu = 1.0 - lambda.iter().cloned().fold(f64::INFINITY, f64::min);
        let tol = 1e-8;
        let sol = regularized_solve(&h, mu, &g, |r, _, gn| r <= tol * gn.max(1.0), backend).unwrap();
        let oracle = common::dense_residual(&h, mu, &sol.s, &g);
        prop_assert!((oracle - sol.residual_norm).abs() <= 1e-12 * (1.0 + g.norm()));
        prop_assert!(oracle <= tol * g.norm().max(1.0) * (1.0 + 1e-6));
    }

    #[test]
    fn step_bounds_hold(lambda in spectrum(12), g in vector(12), seed: u64, log_sigma in -3.0..3.0f64) {
        prop_assume!(g.norm() > 1e-3);
        let h = matrix(&lambda, seed);
        let sigma = 10f64.powf(log_sigma);
        let cfg = SolverConfig::default();
        let mut counters = Counters::default();
        if let ConvexAttempt::Accepted(step) = try_convex_step(&g, &h, sigma, &cfg, &mut counters).unwrap() {
            prop_assert_eq!(bound_violation(&step, &g, &h, sigma, &cfg), None);
        }
        let step = eigen_newton_step(&g, &h, sigma, &cfg, &mut counters).unwrap();
        prop_assert_eq!(bound_violation(&step, &g, &h, sigma, &cfg), None);
        prop_assert!(g.dot(&step.s) <= 0.0);
        let eig = min_eigenpair(&h, cfg.eig_tol).unwrap();
        if eig.lambda_min < 0.0 {
            let step = second_order_step(&g, &h, sigma, &eig).unwrap();
            prop_assert_eq!(bound_violation(&step, &g, &h, sigma, &cfg), None);
            prop_assert!((step.s.norm() - (-eig.lambda_min / sigma)).abs() <= 1e-12 * step.s.norm());
        }
    }

    #[test]
    fn sigma_update_properties(sigma in 1e-12..1e12f64, rho_a in -2.0..2.0f64, rho_b in -2.0..2.0f64) {
        let cfg = SolverConfig::default();
        let (lo, hi) = if rho_a <= rho_b { (rho_a, rho_b) } else { (rho_b, rho_a) };
        let (s_lo, s_hi) = (update_sigma(sigma, lo, &cfg), update_sigma(sigma, hi, &cfg));
        prop_assert!(s_hi <= s_lo);
        for s in [s_lo, s_hi] {
            prop_assert!(s >= cfg.sigma_min.min(sigma));
            prop_assert!(s <= cfg.gamma3 * sigma);
        }
        prop_assert_eq!(update_sigma(sigma, f64::NEG_INFINITY, &cfg), cfg.gamma2 * sigma);
    }

    #[test]
    fn profile_invariants(iters in prop::collection::vec(prop::option::weighted(0.8, 0usize..50), 3 * 8)) {
        let results: Vec<BenchResult> = iters
            .iter()
            .enumerate()
            .map(|(i, it)| BenchResult::new(&format!("a{}", i / 8), &format!("p{}", i % 8), *it))
            .collect();
        let curves = performance_profile(&results).unwrap();
        let mut at_one = 0.0;
        for c in &curves {
            let mut prev = 0.0;
            for &(tau, frac) in &c.breakpoints {
                prop_assert!(tau >= 1.0 && (0.0..=1.0).contains(&frac) && frac >= prev);
                prop_assert_eq!(frac, common::brute_fraction(&results, &c.algo, tau));
                prev = frac;
            }
            let pi = pi_statistic(c);
            prop_assert!((0.0..=0.9 + 1e-15).contains(&pi));
            prop_assert!((pi - common::brute_pi(&results, &c.algo)).abs() <= 1e-12);
            at_one += c.fraction_at(1.0);
        }
        // some algorithm attains the best count on every counted problem
        if curves.iter().any(|c| c.fraction_at(f64::INFINITY) > 0.0) {
            prop_assert!(at_one >= 1.0 - 1e-12);
        }
    }
}

#[test]
fn hessians_symmetric_and_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for entry in list() {
        for n in [entry.default_n, entry.medium_n] {
            let p = entry.instantiate(n).unwrap();
            for _ in 0..3 {
                let x0 = p.x0();
                let x = DVector::from_fn(x0.len(), |i, _| {
                    x0[i] + rand::Rng::gen_range(&mut rng, -1.0..1.0)
                });
                let (h1, h2) = (p.hessian(&x), p.hessian(&x));
                assert!(h1.is_symmetric(), "{}", p.name());
                assert_eq!(h1, h2, "{}", p.name());
                assert_eq!(p.gradient(&x), p.gradient(&x), "{}", p.name());
                assert_eq!(p.value(&x).to_bits(), p.value(&x).to_bits(), "{}", p.name());
            }
        }
    }
}
