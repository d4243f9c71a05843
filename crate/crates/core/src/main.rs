#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use negcurv::bench::{export, format_table, performance_profile, run_grid, summarize};
use negcurv::linalg::LinearSolver;
use negcurv::problems::{self, check_problem, Problem, SuiteTier};
use negcurv::{solve, Error, Mode, SolverConfig, Status, TraceLevel};

const EXIT_USAGE: u8 = 1;
const EXIT_MAX_ITER: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_CHECK: u8 = 4;

/// Adaptive regularized Newton methods with negative curvature.
#[derive(Parser)]
#[command(name = "negcurv", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem; prints the run record as JSON.
    Solve(SolveArgs),
    /// Run an algorithm x problem grid and write profiles.
    Bench(BenchArgs),
    /// Compare analytic derivatives against finite differences.
    Check(CheckArgs),
    /// List registered problems as JSON.
    List,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem spec, `name[:n]`.
    #[arg(long)]
    problem: String,
    #[arg(long, default_value = "an2c")]
    algo: Mode,
    /// Perturb the standard start by U(-1,1) * max(1, |x0_i|).
    #[arg(long)]
    random_start: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    params: Params,
}

#[derive(Args)]
struct BenchArgs {
    /// `small`, `medium`, or `custom-file <path>`.
    #[arg(long, num_args = 1..=2, value_names = ["SUITE", "PATH"], default_values_t = ["small".to_string()])]
    suite: Vec<String>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_value = "an2c,an2e,ar2")]
    algos: Vec<Mode>,
    /// Output directory (default: $NEGCURV_OUT_DIR or `bench_out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    params: Params,
}

#[derive(Args)]
struct CheckArgs {
    /// Problem spec, `name[:n]`.
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    problem: Option<String>,
    /// Check every suite problem.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 1e-5)]
    h: f64,
    /// Random probe points besides the standard start.
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Solver constant overrides.
#[derive(Args)]
struct Params {
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    sigma0: Option<f64>,
    #[arg(long)]
    sigma_min: Option<f64>,
    #[arg(long)]
    kappa_a: Option<f64>,
    #[arg(long)]
    kappa_c: Option<f64>,
    #[arg(long)]
    kappa_theta: Option<f64>,
    #[arg(long)]
    varsigma1: Option<f64>,
    #[arg(long)]
    varsigma2: Option<f64>,
    #[arg(long)]
    varsigma3: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    gamma3: Option<f64>,
    #[arg(long)]
    eta1: Option<f64>,
    #[arg(long)]
    eta2: Option<f64>,
    #[arg(long)]
    theta_sub: Option<f64>,
    #[arg(long)]
    eig_tol: Option<f64>,
    #[arg(long)]
    linear_solver: Option<LinearSolver>,
    #[arg(long)]
    trace: Option<TraceLevel>,
}

impl Params {
    fn apply(&self, mode: Mode) -> Result<SolverConfig, Error> {
        let mut c = SolverConfig::with_mode(mode);
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(
            eps1,
            eps2,
            max_iter,
            sigma0,
            sigma_min,
            kappa_a,
            kappa_c,
            kappa_theta,
            varsigma1,
            varsigma2,
            varsigma3,
            gamma1,
            gamma2,
            gamma3,
            eta1,
            eta2,
            eig_tol,
            linear_solver,
            trace
        );
        if self.theta_sub.is_some() {
            c.theta_sub = self.theta_sub;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Writes a line to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Check(args) => cmd_check(args),
        Command::List => {
            emit(&problems::registry_json());
            ExitCode::SUCCESS
        }
    }
}

fn random_start(problem: Problem, seed: u64) -> Result<Problem, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = problem.x0().clone();
    let x = DVector::from_fn(x0.len(), |i, _| {
        x0[i] + rng.gen_range(-1.0..1.0) * x0[i].abs().max(1.0)
    });
    problem.with_start(x)
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    let cfg = match args.params.apply(args.algo) {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    let mut problem = match problems::lookup(&args.problem) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    if args.random_start {
        problem = match random_start(problem, args.seed) {
            Ok(p) => p,
            Err(e) => return usage_error(e),
        };
    }
    let record = match solve(&problem, &cfg) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    emit(&record.to_json());
    match record.status {
        Status::FirstOrder | Status::SecondOrder => ExitCode::SUCCESS,
        Status::MaxIter => ExitCode::from(EXIT_MAX_ITER),
        Status::NumericFailure => {
            eprintln!(
                "numeric failure: {}",
                record.message.as_deref().unwrap_or("unknown")
            );
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn read_problem_file(path: &str) -> Result<Vec<Problem>, Error> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(problems::lookup)
        .collect()
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    let base = match args.params.apply(Mode::An2c) {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    let suite = match args.suite.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["small"] => problems::suite(SuiteTier::Small),
        ["medium"] => problems::suite(SuiteTier::Medium),
        ["custom-file", path] => match read_problem_file(path) {
            Ok(p) => p,
            Err(e) => return usage_error(e),
        },
        _ => {
            return usage_error(format!(
                "invalid --suite {:?} (expected small, medium, or custom-file <path>)",
                args.suite
            ))
        }
    };
    let out = args
        .out
        .or_else(|| std::env::var_os("NEGCURV_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("bench_out"));
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let results = match run_grid(&args.algos, &suite, &base, workers) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    let curves = match performance_profile(&results) {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    match export(&out, &results, &curves, &base) {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
        }
        Err(e) => return usage_error(format!("cannot write to {}: {e}", out.display())),
    }
    emit(format_table(&summarize(&results, &curves)).trim_end());
    ExitCode::SUCCESS
}

fn cmd_check(args: CheckArgs) -> ExitCode {
    if !(args.h > 0.0) {
        return usage_error(format!("--h must be positive (got {})", args.h));
    }
    let list = if args.all {
        problems::suite(SuiteTier::Small)
    } else {
        match problems::lookup(args.problem.as_deref().unwrap_or_default()) {
            Ok(p) => vec![p],
            Err(e) => return usage_error(e),
        }
    };
    let mut failed = Vec::new();
    for p in &list {
        match check_problem(p, args.h, args.points, args.seed) {
            Ok(rep) => {
                let line = serde_json::json!({
                    "problem": p.name(),
                    "max_rel_grad_err": rep.max_rel_grad_err,
                    "max_rel_hess_err": rep.max_rel_hess_err,
                    "probe_points": rep.probe_points.len(),
                    "ok": rep.within_tolerance(),
                });
                emit(&line.to_string());
                if !rep.within_tolerance() {
                    failed.push(p.name().to_string());
                }
            }
            Err(e) => {
                eprintln!("{}: {e}", p.name());
                failed.push(p.name().to_string());
            }
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("derivative check failed: {}", failed.join(", "));
        ExitCode::from(EXIT_CHECK)
    }
}
