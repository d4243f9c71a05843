//! Adaptive cubic regularization baseline.

use super::{
    ratio_from_decrease, sigma_overflowed, solve_cubic_subproblem, update_sigma, IterationTrace,
    IterationView, Run, RunRecord, Status,
};
use crate::config::{Mode, SolverConfig};
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::step::{StepOutcome, StepTag};

/// Runs the cubic-regularization baseline; `cfg.mode` must be `ar2`.
pub fn solve_ar2(problem: &Problem, cfg: &SolverConfig) -> Result<RunRecord> {
    if cfg.mode != Mode::Ar2 {
        return Err(Error::InvalidConfig(format!(
            "solve_ar2 called with mode {}",
            cfg.mode
        )));
    }
    super::solve(problem, cfg)
}

pub(super) fn run<F>(problem: &Problem, cfg: &SolverConfig, mut observer: F) -> Result<RunRecord>
where
    F: FnMut(&IterationView<'_>),
{
    let mut run = match Run::start(problem, cfg) {
        Ok(run) => run,
        Err(record) => return Ok(*record),
    };
    let theta = cfg.theta_sub_for(problem.dim());
    loop {
        let gnorm = run.g.norm();
        if gnorm <= cfg.eps1 {
            return Ok(run.finish(Status::FirstOrder, None, None));
        }
        if run.k >= cfg.max_iter {
            return Ok(run.finish(Status::MaxIter, None, None));
        }
        let sub = match solve_cubic_subproblem(&run.g, &run.h, run.sigma, theta) {
            Ok(sub) => sub,
            Err(e) => return Ok(run.finish(Status::NumericFailure, None, Some(e.to_string()))),
        };
        if sub.restarted {
            run.counters.eigen_solves += 1;
        }
        let step = StepOutcome {
            tag: StepTag::Ar2,
            residual_norm: sub.model_grad_norm,
            lambda_min_used: None,
            model_decrease: sub.model_decrease,
            mu: Some(sub.lambda),
            s: sub.s,
        };
        let x_trial = &run.x + &step.s;
        run.counters.f_evals += 1;
        let f_trial = problem.value(&x_trial);
        let rho = ratio_from_decrease(run.f, f_trial, step.model_decrease);
        let success = rho >= cfg.eta1;
        observer(&IterationView {
            k: run.k,
            x: &run.x,
            f: run.f,
            g: &run.g,
            h: &run.h,
            sigma: run.sigma,
            step: &step,
            f_trial,
            rho,
            success,
        });
        run.record(IterationTrace {
            k: run.k,
            f: run.f,
            grad_norm: gnorm,
            sigma: run.sigma,
            rho,
            step_tag: StepTag::Ar2,
            step_norm: step.s.norm(),
            success,
            eigen_solve_used: sub.restarted,
            lambda_min: None,
            model_decrease: step.model_decrease,
            residual: step.residual_norm,
        });
        run.k += 1;
        if success {
            if let Err(e) = run.accept(x_trial, f_trial) {
                return Ok(run.finish(Status::NumericFailure, None, Some(e.to_string())));
            }
        }
        let sigma = update_sigma(run.sigma, rho, cfg);
        if sigma_overflowed(sigma, gnorm, cfg) {
            return Ok(run.finish(
                Status::NumericFailure,
                None,
                Some("regularization parameter overflowed".into()),
            ));
        }
        run.set_sigma(sigma);
    }
}
