//! Algorithm × problem grids, performance profiles, and the π/ρ statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Mode, SolverConfig};
use crate::error::{Error, Result};
use crate::problems::{Counters, Problem};
use crate::solver::{solve, Status};
use crate::TraceLevel;

/// Upper end of the τ range used by π.
pub const TAU_MAX: f64 = 10.0;

/// One (algorithm, problem) run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub algo: String,
    pub problem: String,
    pub n: usize,
    /// `None` when the run did not reach its termination test.
    pub iterations: Option<usize>,
    pub success: bool,
    pub counters: Counters,
    pub status: Option<Status>,
}

impl BenchResult {
    /// A result with only the profile-relevant fields set.
    pub fn new(algo: &str, problem: &str, iterations: Option<usize>) -> Self {
        Self {
            algo: algo.to_string(),
            problem: problem.to_string(),
            n: 1,
            iterations,
            success: iterations.is_some(),
            counters: Counters::default(),
            status: None,
        }
    }
}

/// Runs every algorithm on every problem with up to `workers` threads.
///
/// `base` supplies all constants; its mode is replaced per algorithm. Runs
/// that fail for any reason are recorded as unsolved. Results are sorted by
/// algorithm name, then problem name.
pub fn run_grid(
    algos: &[Mode],
    problems: &[Problem],
    base: &SolverConfig,
    workers: usize,
) -> Result<Vec<BenchResult>> {
    if algos.is_empty() || problems.is_empty() {
        return Err(Error::EmptyGrid("no algorithms or no problems".into()));
    }
    base.validate()?;
    let jobs: Vec<(Mode, &Problem)> = algos
        .iter()
        .flat_map(|&a| problems.iter().map(move |p| (a, p)))
        .collect();
    let run_one = |&(mode, problem): &(Mode, &Problem)| {
        let cfg = SolverConfig {
            mode,
            trace: TraceLevel::None,
            ..base.clone()
        };
        let (iterations, counters, status) = match solve(problem, &cfg) {
            Ok(r) if r.status.is_success() => (Some(r.iterations), r.counters, Some(r.status)),
            Ok(r) => (None, r.counters, Some(r.status)),
            Err(e) => {
                log::warn!("{mode} on {}: {e}", problem.name());
                (None, Counters::default(), None)
            }
        };
        BenchResult {
            algo: mode.to_string(),
            problem: problem.name().to_string(),
            n: problem.dim(),
            success: iterations.is_some(),
            iterations,
            counters,
            status,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let mut results: Vec<BenchResult> = pool.install(|| jobs.par_iter().map(run_one).collect());
    sort_results(&mut results);
    Ok(results)
}

pub fn sort_results(results: &mut [BenchResult]) {
    results.sort_by(|a, b| {
        (a.algo.as_str(), a.problem.as_str()).cmp(&(b.algo.as_str(), b.problem.as_str()))
    });
}

/// Right-continuous step function `τ ↦ fraction`, given by its jumps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCurve {
    pub algo: String,
    /// `(τ, fraction)` sorted by τ, starting at τ = 1.
    pub breakpoints: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// Value of the step function at `tau ≥ 1`.
    pub fn fraction_at(&self, tau: f64) -> f64 {
        self.breakpoints
            .iter()
            .take_while(|(t, _)| *t <= tau)
            .last()
            .map_or(0.0, |(_, f)| *f)
    }
}

/// Iteration performance profiles, one per algorithm, in name order.
///
/// A problem counts for an algorithm at `τ` when the algorithm solved it in at
/// most `τ` times the fewest iterations any algorithm needed. Problems no
/// algorithm solved are left out of the denominator.
pub fn performance_profile(results: &[BenchResult]) -> Result<Vec<ProfileCurve>> {
    if results.is_empty() {
        return Err(Error::EmptyGrid("no results".into()));
    }
    let mut table: BTreeMap<&str, BTreeMap<&str, Option<usize>>> = BTreeMap::new();
    let mut problems: BTreeSet<&str> = BTreeSet::new();
    for r in results {
        problems.insert(&r.problem);
        let iters = if r.success { r.iterations } else { None };
        if table
            .entry(&r.algo)
            .or_default()
            .insert(&r.problem, iters)
            .is_some()
        {
            return Err(Error::EmptyGrid(format!(
                "duplicate result for {} on {}",
                r.algo, r.problem
            )));
        }
    }
    for (algo, row) in &table {
        if row.len() != problems.len() {
            return Err(Error::EmptyGrid(format!("{algo} is missing problems")));
        }
    }
    let best: BTreeMap<&str, usize> = problems
        .iter()
        .filter_map(|p| {
            table
                .values()
                .filter_map(|row| row[p])
                .min()
                .map(|b| (*p, b))
        })
        .collect();
    let denom = best.len();
    let curves = table
        .iter()
        .map(|(algo, row)| {
            let mut ratios: Vec<f64> = best
                .iter()
                .filter_map(|(p, &b)| {
                    row[p].map(|it| {
                        if it == b {
                            1.0
                        } else {
                            it as f64 / b.max(1) as f64
                        }
                    })
                })
                .collect();
            ratios.sort_by(f64::total_cmp);
            let mut breakpoints = vec![(1.0, 0.0)];
            for (i, r) in ratios.iter().enumerate() {
                let frac = (i + 1) as f64 / denom as f64;
                match breakpoints.last_mut() {
                    Some(last) if last.0 == *r => last.1 = frac,
                    _ => breakpoints.push((*r, frac)),
                }
            }
            ProfileCurve {
                algo: algo.to_string(),
                breakpoints,
            }
        })
        .collect();
    Ok(curves)
}

/// `(1/10) ∫₁¹⁰ fraction(τ) dτ`, integrated exactly over the steps.
pub fn pi_statistic(curve: &ProfileCurve) -> f64 {
    let bp = &curve.breakpoints;
    let mut area = 0.0;
    for (i, &(t, f)) in bp.iter().enumerate() {
        if t >= TAU_MAX {
            break;
        }
        let end = bp.get(i + 1).map_or(TAU_MAX, |next| next.0.min(TAU_MAX));
        area += f * (end - t.max(1.0));
    }
    area / 10.0
}

/// Percentage of successful runs.
pub fn rho_statistic(results: &[BenchResult]) -> f64 {
    if results.is_empty() {
        return 0.0;
    }
    100.0 * results.iter().filter(|r| r.success).count() as f64 / results.len() as f64
}

/// π and ρ for one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgoSummary {
    pub algo: String,
    pub pi: f64,
    pub rho: f64,
    pub solved: usize,
    pub total: usize,
}

pub fn summarize(results: &[BenchResult], curves: &[ProfileCurve]) -> Vec<AlgoSummary> {
    curves
        .iter()
        .map(|c| {
            let mine: Vec<BenchResult> = results
                .iter()
                .filter(|r| r.algo == c.algo)
                .cloned()
                .collect();
            AlgoSummary {
                algo: c.algo.clone(),
                pi: pi_statistic(c),
                rho: rho_statistic(&mine),
                solved: mine.iter().filter(|r| r.success).count(),
                total: mine.len(),
            }
        })
        .collect()
}

pub fn results_csv(results: &[BenchResult]) -> String {
    let mut out =
        String::from("algo,problem,n,iterations,success,f_evals,g_evals,H_evals,eigen_solves\n");
    for r in results {
        let iters = r
            .iterations
            .map_or_else(|| "unsolved".to_string(), |k| k.to_string());
        let c = &r.counters;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.algo,
            r.problem,
            r.n,
            iters,
            r.success,
            c.f_evals,
            c.g_evals,
            c.h_evals,
            c.eigen_solves
        )
        .expect("write to string");
    }
    out
}

pub fn profile_csv(curve: &ProfileCurve) -> String {
    let mut out = String::from("tau,fraction\n");
    for (t, f) in &curve.breakpoints {
        writeln!(out, "{t},{f}").expect("write to string");
    }
    out
}

#[derive(Serialize)]
struct Summary<'a> {
    algos: &'a [AlgoSummary],
    problems: usize,
    config: &'a SolverConfig,
}

pub fn summary_json(summaries: &[AlgoSummary], problems: usize, cfg: &SolverConfig) -> String {
    serde_json::to_string_pretty(&Summary {
        algos: summaries,
        problems,
        config: cfg,
    })
    .expect("summary serializes")
}

/// Writes `results.csv`, `profile_<algo>.csv` per algorithm, and
/// `summary.json` into `dir`, creating it if needed.
pub fn export(
    dir: &Path,
    results: &[BenchResult],
    curves: &[ProfileCurve],
    cfg: &SolverConfig,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put("results.csv".into(), results_csv(results))?;
    for c in curves {
        put(format!("profile_{}.csv", c.algo), profile_csv(c))?;
    }
    let problems: BTreeSet<&str> = results.iter().map(|r| r.problem.as_str()).collect();
    put(
        "summary.json".into(),
        summary_json(&summarize(results, curves), problems.len(), cfg),
    )?;
    Ok(written)
}

/// Plain-text π/ρ table.
pub fn format_table(summaries: &[AlgoSummary]) -> String {
    let mut out = format!("{:<8} {:>8} {:>8}\n", "algo", "pi", "rho");
    for s in summaries {
        writeln!(out, "{:<8} {:>8.4} {:>8.2}", s.algo, s.pi, s.rho).expect("write to string");
    }
    out
}
