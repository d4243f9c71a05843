mod common;

use nalgebra::DVector;
use negcurv::linalg::LinearSolver;
use negcurv::problems::{lookup, suite, SuiteTier};
use negcurv::solver::{acceptance_ratio, solve_observed, IterationView};
use negcurv::step::StepTag;
use negcurv::{solve, Mode, SolverConfig, Status, TraceLevel};

fn cfg(mode: Mode) -> SolverConfig {
    SolverConfig {
        trace: TraceLevel::Full,
        ..SolverConfig::with_mode(mode)
    }
}

#[test]
fn accepted_steps_decrease_f_and_sigma_stays_bounded() {
    for mode in Mode::ALL {
        for p in suite(SuiteTier::Small) {
            let c = cfg(mode);
            let r = solve(&p, &c).unwrap();
            let mut f = f64::INFINITY;
            for t in &r.trace {
                assert!(t.f <= f, "{mode} {}: f increased at k={}", p.name(), t.k);
                f = t.f;
                assert!(
                    t.sigma >= c.sigma_min && t.sigma <= r.sigma_max,
                    "{mode} {}",
                    p.name()
                );
            }
            assert!(r.f_final <= p.value(p.x0()), "{mode} {}", p.name());
            assert_eq!(r.trace.len(), r.iterations);
            assert_eq!(
                r.trace.iter().filter(|t| t.success).count(),
                r.successful_iterations
            );
        }
    }
}

#[test]
fn trace_ratio_matches_recomputation() {
    let p = lookup("woods").unwrap();
    let c = cfg(Mode::An2e);
    let mut checked = 0;
    solve_observed(&p, &c, |v: &IterationView<'_>| {
        let rho = acceptance_ratio(v.f, v.f_trial, v.g, v.h, &v.step.s);
        assert!(
            rho == v.rho || (rho - v.rho).abs() <= 1e-9 * rho.abs().max(1.0),
            "{rho} vs {}",
            v.rho
        );
        assert_eq!(v.f_trial, p.value(&(v.x + &v.step.s)));
        checked += 1;
    })
    .unwrap();
    assert!(checked > 10);
}

#[test]
fn an2e_uses_only_eigen_steps() {
    for p in suite(SuiteTier::Small) {
        let r = solve(&p, &cfg(Mode::An2e)).unwrap();
        for t in &r.trace {
            assert!(
                matches!(t.step_tag, StepTag::Neig | StepTag::Curv),
                "{}: {:?}",
                p.name(),
                t.step_tag
            );
        }
    }
}

#[test]
fn first_order_modes_never_take_so_steps() {
    for mode in [Mode::An2c, Mode::An2e] {
        for p in suite(SuiteTier::Small) {
            let r = solve(&p, &cfg(mode)).unwrap();
            assert!(
                r.trace.iter().all(|t| t.step_tag != StepTag::So),
                "{mode} {}",
                p.name()
            );
            assert_ne!(r.status, Status::SecondOrder);
        }
    }
}

#[test]
fn termination_status_is_truthful() {
    for mode in Mode::ALL {
        for p in suite(SuiteTier::Small) {
            let c = cfg(mode);
            let r = solve(&p, &c).unwrap();
            let x = DVector::from_vec(r.x_final.clone());
            let g = p.gradient(&x).norm();
            match r.status {
                Status::FirstOrder => assert!(g <= c.eps1, "{mode} {}: {g}", p.name()),
                Status::SecondOrder => {
                    assert!(g <= c.eps1);
                    assert!(
                        common::min_eig_above(&p.hessian(&x), c.eps2 * (1.0 + 1e-6)),
                        "{mode} {}",
                        p.name()
                    );
                }
                Status::MaxIter => assert_eq!(r.iterations, c.max_iter),
                Status::NumericFailure => assert!(r.message.is_some()),
            }
            assert_eq!(r.f_final, p.value(&x));
        }
    }
}

#[test]
fn cg_backend_matches_direct_outcomes() {
    for spec in ["rosenbr:10", "woods", "diagquad:300", "tridia:300"] {
        let p = lookup(spec).unwrap();
        for mode in [Mode::An2c, Mode::An2e] {
            let direct = solve(&p, &SolverConfig::with_mode(mode)).unwrap();
            let cg = solve(
                &p,
                &SolverConfig {
                    linear_solver: LinearSolver::Cg,
                    ..SolverConfig::with_mode(mode)
                },
            )
            .unwrap();
            assert_eq!(direct.status, Status::FirstOrder, "{spec} {mode}");
            assert_eq!(cg.status, Status::FirstOrder, "{spec} {mode}");
            assert!(
                (direct.f_final - cg.f_final).abs() <= 1e-6 * direct.f_final.abs().max(1.0),
                "{spec} {mode}"
            );
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let p = lookup("curly10").unwrap();
    for mode in Mode::ALL {
        let a = solve(&p, &cfg(mode)).unwrap();
        let b = solve(&p, &cfg(mode)).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "{mode}");
    }
}

#[test]
fn stationary_start_on_minimizer() {
    let p = lookup("rosenbr:4")
        .unwrap()
        .with_start(DVector::from_element(4, 1.0))
        .unwrap();
    for mode in Mode::ALL {
        let r = solve(&p, &cfg(mode)).unwrap();
        assert_eq!(r.iterations, 0, "{mode}");
        assert!(r.status.is_success());
    }
}
