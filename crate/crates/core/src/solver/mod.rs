//! Adaptive outer loops and run records.

mod ar2;
mod cubic;

use nalgebra::DVector;
use serde::{Serialize, Serializer};

pub use ar2::solve_ar2;
pub use cubic::{solve_cubic_subproblem, CubicSolution};

use crate::config::{Mode, SolverConfig, TraceLevel};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenpair, EigenPair, SymMatrix};
use crate::problems::{evaluate, Counters, Order, Problem};
use crate::step::{
    eigen_newton_step_with, second_order_step, try_convex_step, ConvexAttempt, StepOutcome, StepTag,
};

/// Relative size below which the model decrease is treated as zero.
pub const DECREASE_GUARD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    FirstOrder,
    SecondOrder,
    MaxIter,
    NumericFailure,
}

impl Status {
    pub fn is_success(self) -> bool {
        matches!(self, Status::FirstOrder | Status::SecondOrder)
    }
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

/// One iteration of a run.
#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    pub k: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub sigma: f64,
    /// `null` in JSON when the ratio is −∞.
    #[serde(serialize_with = "finite_or_null")]
    pub rho: f64,
    pub step_tag: StepTag,
    pub step_norm: f64,
    pub success: bool,
    pub eigen_solve_used: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    pub model_decrease: f64,
    pub residual: f64,
}

/// Outcome of a solver run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub problem: String,
    pub algo: Mode,
    pub status: Status,
    pub iterations: usize,
    pub successful_iterations: usize,
    pub f_final: f64,
    pub grad_norm_final: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min_final: Option<f64>,
    pub sigma_max: f64,
    pub counters: Counters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub x_final: Vec<f64>,
    pub trace: Vec<IterationTrace>,
}

impl RunRecord {
    /// Right-hand side of the iteration-count bound
    /// `|S| (1 + |log γ₁| / log γ₂) + log(σmax/σ₀) / log γ₂ + 1`.
    pub fn iteration_bound(&self, cfg: &SolverConfig) -> f64 {
        let lg2 = cfg.gamma2.ln();
        self.successful_iterations as f64 * (1.0 + cfg.gamma1.ln().abs() / lg2)
            + (self.sigma_max / cfg.sigma0).ln() / lg2
            + 1.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run record serializes")
    }
}

/// Read-only view of an iteration, passed to observers.
pub struct IterationView<'a> {
    pub k: usize,
    pub x: &'a DVector<f64>,
    pub f: f64,
    pub g: &'a DVector<f64>,
    pub h: &'a SymMatrix,
    pub sigma: f64,
    pub step: &'a StepOutcome,
    pub f_trial: f64,
    pub rho: f64,
    pub success: bool,
}

/// `ρ = (f_x − f_trial) / −(gᵀs + ½ sᵀHs)`, or −∞ when the model decrease is
/// not positive relative to `max(1, |f_x|)` or `f_trial` is not finite.
pub fn acceptance_ratio(
    f_x: f64,
    f_trial: f64,
    g: &DVector<f64>,
    h: &SymMatrix,
    s: &DVector<f64>,
) -> f64 {
    ratio_from_decrease(f_x, f_trial, -h.model_change(g, s))
}

pub(crate) fn ratio_from_decrease(f_x: f64, f_trial: f64, decrease: f64) -> f64 {
    if !f_trial.is_finite() || !(decrease > DECREASE_GUARD * f_x.abs().max(1.0)) {
        return f64::NEG_INFINITY;
    }
    (f_x - f_trial) / decrease
}

/// Regularization update at the interval endpoints.
pub fn update_sigma(sigma: f64, rho: f64, cfg: &SolverConfig) -> f64 {
    if rho >= cfg.eta2 {
        (cfg.gamma1 * sigma).max(cfg.sigma_min)
    } else if rho >= cfg.eta1 {
        sigma
    } else {
        cfg.gamma2 * sigma
    }
}

/// Runs the configured algorithm from the problem's starting point.
pub fn solve(problem: &Problem, cfg: &SolverConfig) -> Result<RunRecord> {
    solve_observed(problem, cfg, |_| {})
}

/// As [`solve`], calling `observer` after every trial step.
pub fn solve_observed<F>(problem: &Problem, cfg: &SolverConfig, observer: F) -> Result<RunRecord>
where
    F: FnMut(&IterationView<'_>),
{
    cfg.validate()?;
    match cfg.mode {
        Mode::Ar2 => ar2::run(problem, cfg, observer),
        _ => run_newton(problem, cfg, observer),
    }
}

/// Mutable state shared by the outer loops.
pub(crate) struct Run<'p> {
    pub problem: &'p Problem,
    pub mode: Mode,
    pub trace_level: TraceLevel,
    pub x: DVector<f64>,
    pub f: f64,
    pub g: DVector<f64>,
    pub h: SymMatrix,
    pub sigma: f64,
    pub sigma_max: f64,
    pub counters: Counters,
    pub trace: Vec<IterationTrace>,
    pub successes: usize,
    pub k: usize,
}

impl<'p> Run<'p> {
    /// Evaluates the starting point; `Err` carries a finished failure record.
    pub fn start(problem: &'p Problem, cfg: &SolverConfig) -> std::result::Result<Self, Box<RunRecord>> {
        let mut counters = Counters::default();
        let x = problem.x0().clone();
        let e = evaluate(problem, &x, Order::Hessian, &mut counters)
            .expect("x0 has the problem dimension");
        let run = Run {
            problem,
            mode: cfg.mode,
            trace_level: cfg.trace,
            f: e.f,
            g: e.g.clone().unwrap_or_else(|| DVector::zeros(x.len())),
            h: e.h
                .clone()
                .unwrap_or_else(|| SymMatrix::from_diagonal(&vec![0.0; x.len()])),
            x,
            sigma: cfg.sigma0,
            sigma_max: cfg.sigma0,
            counters,
            trace: Vec::new(),
            successes: 0,
            k: 0,
        };
        if !e.is_finite() {
            return Err(Box::new(run.finish(
                Status::NumericFailure,
                None,
                Some("non-finite derivatives at the starting point".into()),
            )));
        }
        Ok(run)
    }

    /// Moves to `x_new` and re-evaluates derivatives there.
    pub fn accept(&mut self, x_new: DVector<f64>, f_new: f64) -> Result<()> {
        self.counters.g_evals += 1;
        self.counters.h_evals += 1;
        let g = self.problem.gradient(&x_new);
        let h = self.problem.hessian(&x_new);
        if g.iter().any(|v| !v.is_finite()) || !h.is_finite() {
            return Err(Error::NonFinite("derivatives at an accepted point".into()));
        }
        self.x = x_new;
        self.f = f_new;
        self.g = g;
        self.h = h;
        self.successes += 1;
        Ok(())
    }

    pub fn record(&mut self, t: IterationTrace) {
        if self.trace_level != TraceLevel::None {
            self.trace.push(t);
        }
    }

    pub fn set_sigma(&mut self, sigma: f64) {
        self.sigma = sigma;
        self.sigma_max = self.sigma_max.max(sigma);
    }

    pub fn finish(
        mut self,
        status: Status,
        lambda_min: Option<f64>,
        message: Option<String>,
    ) -> RunRecord {
        if self.trace_level == TraceLevel::Summary && self.trace.len() > 2 {
            let last = self.trace.pop().expect("nonempty trace");
            self.trace.truncate(1);
            self.trace.push(last);
        }
        RunRecord {
            problem: self.problem.name().to_string(),
            algo: self.mode,
            status,
            iterations: self.k,
            successful_iterations: self.successes,
            f_final: self.f,
            grad_norm_final: self.g.norm(),
            lambda_min_final: lambda_min,
            sigma_max: self.sigma_max,
            counters: self.counters,
            message,
            x_final: self.x.iter().copied().collect(),
            trace: self.trace,
        }
    }
}

fn run_newton<F>(problem: &Problem, cfg: &SolverConfig, mut observer: F) -> Result<RunRecord>
where
    F: FnMut(&IterationView<'_>),
{
    let mut run = match Run::start(problem, cfg) {
        Ok(run) => run,
        Err(record) => return Ok(*record),
    };
    // minimum eigenpair at the current point, cleared on a move
    let mut eig: Option<EigenPair> = None;
    let mode = cfg.mode;

    loop {
        let gnorm = run.g.norm();
        let small_grad = gnorm <= cfg.eps1;
        if small_grad && !mode.is_second_order() {
            let lam = eig.as_ref().map(|e| e.lambda_min);
            return Ok(run.finish(Status::FirstOrder, lam, None));
        }
        if small_grad {
            if eig.is_none() {
                run.counters.eigen_solves += 1;
                match min_eigenpair(&run.h, cfg.eig_tol) {
                    Ok(e) => eig = Some(e),
                    Err(e) => {
                        return Ok(run.finish(Status::NumericFailure, None, Some(e.to_string())))
                    }
                }
            }
            let lam = eig
                .as_ref()
                .map(|e| e.lambda_min)
                .expect("eigenpair computed");
            if lam >= -cfg.eps2 {
                return Ok(run.finish(Status::SecondOrder, Some(lam), None));
            }
        }
        if run.k >= cfg.max_iter {
            let lam = eig.as_ref().map(|e| e.lambda_min);
            return Ok(run.finish(Status::MaxIter, lam, None));
        }

        let eig_before = run.counters.eigen_solves;
        let step = match newton_step(
            &run.g,
            &run.h,
            run.sigma,
            cfg,
            small_grad,
            &mut eig,
            &mut run.counters,
        ) {
            Ok(s) => s,
            Err(e) => {
                let lam = eig.as_ref().map(|e| e.lambda_min);
                return Ok(run.finish(Status::NumericFailure, lam, Some(e.to_string())));
            }
        };
        let eigen_solve_used = run.counters.eigen_solves > eig_before;

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
            step_tag: step.tag,
            step_norm: step.s.norm(),
            success,
            eigen_solve_used,
            lambda_min: step.lambda_min_used,
            model_decrease: step.model_decrease,
            residual: step.residual_norm,
        });

        run.k += 1;
        if success {
            if let Err(e) = run.accept(x_trial, f_trial) {
                return Ok(run.finish(Status::NumericFailure, None, Some(e.to_string())));
            }
            eig = None;
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

/// True once `sigma`, or a shift derived from it, is no longer finite.
pub(crate) fn sigma_overflowed(sigma: f64, gnorm: f64, cfg: &SolverConfig) -> bool {
    !(sigma * cfg.kappa_a.max(1.0) * gnorm.max(1.0)).is_finite()
}

/// Step selection for the AN2C/AN2E/SOAN2C/SOAN2E family.
fn newton_step(
    g: &DVector<f64>,
    h: &SymMatrix,
    sigma: f64,
    cfg: &SolverConfig,
    small_grad: bool,
    eig: &mut Option<EigenPair>,
    counters: &mut Counters,
) -> Result<StepOutcome> {
    if small_grad {
        let pair = eig
            .as_ref()
            .expect("second-order modes compute the eigenpair first");
        return second_order_step(g, h, sigma, pair);
    }
    if cfg.mode.tries_convex_step() {
        if let ConvexAttempt::Accepted(step) = try_convex_step(g, h, sigma, cfg, counters)? {
            return Ok(step);
        }
    }
    if eig.is_none() {
        counters.eigen_solves += 1;
        *eig = Some(min_eigenpair(h, cfg.eig_tol)?);
    }
    eigen_newton_step_with(
        g,
        h,
        sigma,
        cfg,
        eig.as_ref().expect("just computed"),
        counters,
    )
}
