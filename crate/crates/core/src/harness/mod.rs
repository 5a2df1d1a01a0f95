//! Benchmark sweeps over generated or stored instances.
//!
//! For every (instance, seed) pair the runner executes EI-UCS, BEAST with no
//! threshold, and BEAUTY&BEAST, and records their counters. Estimation time
//! is simulated: each level has a fixed time weight and `T_e` is the
//! weighted sum of invocation counts.

mod metrics;
mod report;

use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ewdg::{parse_instance, EwdgError, SearchGraph};
use crate::gen::{generate_instance, Family, GenError};
use crate::scalar::Extended;
use crate::search::{beast, beauty_and_beast, ei_ucs, SearchOptions, SolveReport, Status, TaspOptions};
use crate::{Bound, Instance, Rational};

pub use metrics::{compute_metrics, ColumnStats, GroupMetrics, MetricsTable, RecordMetrics};
pub use report::{read_results_csv, render_report, write_results_csv, Format, CSV_HEADER};

/// Per-algorithm run limit used when none is given.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed results: {0}")]
    Malformed(String),
    #[error("no records to aggregate")]
    EmptyInput,
    #[error("unsupported report format `{0}`")]
    UnsupportedFormat(String),
    #[error("invalid cost model: {0}")]
    CostModel(String),
    #[error("{path}: {source}")]
    Instance { path: String, source: EwdgError },
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// Simulated time per estimator invocation, by level.
#[derive(Clone, Debug, PartialEq)]
pub struct CostModel {
    taus: Vec<Rational>,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { taus: [1, 10, 100].map(Rational::from_integer).to_vec() }
    }
}

impl CostModel {
    /// Weights must be non-negative and non-decreasing with level. Levels past
    /// the last weight reuse it.
    pub fn new(taus: Vec<Rational>) -> Result<Self, HarnessError> {
        if taus.is_empty() {
            return Err(HarnessError::CostModel("at least one weight is required".into()));
        }
        if taus.iter().any(|t| *t < Rational::from_integer(0)) || taus.windows(2).any(|w| w[0] > w[1]) {
            return Err(HarnessError::CostModel("weights must be non-negative and non-decreasing".into()));
        }
        Ok(CostModel { taus })
    }

    pub fn taus(&self) -> &[Rational] {
        &self.taus
    }

    pub fn sim_time(&self, counts: &[u64]) -> Rational {
        counts.iter().enumerate().fold(Rational::from_integer(0), |acc, (i, &n)| {
            let tau = self.taus[i.min(self.taus.len() - 1)];
            acc + tau * Rational::from_integer(n as i64)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgStats {
    pub status: Status,
    pub theta_max: u64,
    pub counts: Vec<u64>,
    pub expanded: u64,
    pub generated: u64,
    pub pruned: u64,
    #[serde(serialize_with = "crate::scalar::serialize_display")]
    pub sim_time: Rational,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl AlgStats {
    fn from_report(report: &SolveReport<Rational>, model: &CostModel, wall_time: Duration) -> Self {
        AlgStats {
            status: report.status,
            theta_max: report.theta_max,
            counts: report.counters.clone(),
            expanded: report.expanded,
            generated: report.generated,
            pruned: report.pruned,
            sim_time: model.sim_time(&report.counters),
            wall_time,
        }
    }

    /// Stats for a phase that never ran.
    pub fn skipped() -> Self {
        AlgStats {
            status: Status::Found,
            theta_max: 0,
            counts: Vec::new(),
            expanded: 0,
            generated: 0,
            pruned: 0,
            sim_time: Rational::from_integer(0),
            wall_time: Duration::ZERO,
        }
    }

    /// Count at `level` (1-based); the last column folds in deeper levels.
    pub fn count_at(&self, level: usize, fold_rest: bool) -> u64 {
        if fold_rest {
            self.counts.iter().skip(level - 1).sum()
        } else {
            self.counts.get(level - 1).copied().unwrap_or(0)
        }
    }
}

/// One (instance, seed) benchmark row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub group: String,
    pub seed: Option<u64>,
    pub ei_ucs: AlgStats,
    pub beast: AlgStats,
    /// Lower-bound phase of BEAUTY&BEAST.
    pub bnb_beauty: AlgStats,
    /// Bounded upper-bound phase of BEAUTY&BEAST.
    pub bnb_beast: AlgStats,
    pub l_star: Bound,
    pub u_star: Bound,
    pub b_star: Bound,
    /// Some algorithm hit the timeout; excluded from aggregates and CSV.
    pub timed_out: bool,
}

/// One unit of benchmark work.
#[derive(Clone, Debug)]
pub struct Job {
    pub instance: Instance,
    pub group: String,
    pub seed: Option<u64>,
}

impl Job {
    pub fn new(instance: Instance, seed: Option<u64>) -> Self {
        Job { group: group_of(&instance.name), instance, seed }
    }
}

/// Family name of an instance: its name without a trailing `-s<seed>`.
pub fn group_of(name: &str) -> String {
    match name.rsplit_once("-s") {
        Some((stem, digits)) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => stem.to_owned(),
        _ => name.to_owned(),
    }
}

/// Seed encoded in an instance name's `-s<seed>` suffix.
pub fn seed_of(name: &str) -> Option<u64> {
    name.rsplit_once("-s").and_then(|(_, digits)| digits.parse().ok())
}

/// Generates one job per (family, seed).
pub fn sweep_jobs(families: &[Family], seeds: impl IntoIterator<Item = u64> + Clone) -> Result<Vec<Job>, HarnessError> {
    let mut jobs = Vec::new();
    for family in families {
        for seed in seeds.clone() {
            let instance = generate_instance(&family.with_seed(seed))?;
            jobs.push(Job { instance, group: family.name(), seed: Some(seed) });
        }
    }
    Ok(jobs)
}

/// Loads every `*.json` instance in `dir`, in file name order.
pub fn corpus_jobs(dir: &Path) -> Result<Vec<Job>, HarnessError> {
    let io = |e: std::io::Error| HarnessError::Io { path: dir.display().to_string(), source: e };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| p.extension().is_some_and(|ext| ext == "json"));
    paths.sort();
    paths
        .iter()
        .map(|path| {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Io { path: path.display().to_string(), source: e })?;
            let instance: Instance = parse_instance(&text)
                .and_then(|inst| inst.validate().map(|_| inst).map_err(EwdgError::Invalid))
                .map_err(|e| HarnessError::Instance { path: path.display().to_string(), source: e })?;
            let seed = seed_of(&instance.name);
            Ok(Job::new(instance, seed))
        })
        .collect()
}

fn timed<R>(timeout: Option<Duration>, run: impl FnOnce(&SearchOptions) -> R) -> (R, Duration) {
    let start = Instant::now();
    let opts = SearchOptions { deadline: timeout.map(|t| start + t), ..Default::default() };
    let out = run(&opts);
    (out, start.elapsed())
}

/// Runs all three solvers on one job.
pub fn run_job(job: &Job, model: &CostModel, timeout: Option<Duration>) -> Result<BenchRecord, HarnessError> {
    let graph = SearchGraph::new(&job.instance)
        .map_err(|e| HarnessError::Instance { path: job.instance.name.clone(), source: e })?;
    let (base, base_time) = timed(timeout, |o| ei_ucs(&graph, o));
    let (lazy, lazy_time) = timed(timeout, |o| beast(&graph, &Extended::Infinite, o));
    let (tasp, tasp_time) =
        timed(timeout, |o| beauty_and_beast(&graph, &TaspOptions { search: o.clone(), share_cache: false }));

    let bnb_beauty = AlgStats::from_report(&tasp.slb_report, model, tasp_time);
    let bnb_beast = match &tasp.sub_report {
        Some(sub) => AlgStats::from_report(sub, model, tasp_time),
        None => AlgStats::skipped(),
    };
    let timed_out = [base.status, lazy.status, tasp.status].contains(&Status::TimedOut);
    Ok(BenchRecord {
        instance: job.instance.name.clone(),
        group: job.group.clone(),
        seed: job.seed,
        ei_ucs: AlgStats::from_report(&base, model, base_time),
        beast: AlgStats::from_report(&lazy, model, lazy_time),
        bnb_beauty,
        bnb_beast,
        l_star: tasp.l_star,
        u_star: tasp.u_star,
        b_star: tasp.b_star,
        timed_out,
    })
}

/// Runs every job (in parallel) and returns records sorted by
/// (instance, seed), independent of completion order.
pub fn run_benchmark(jobs: &[Job], model: &CostModel, timeout: Option<Duration>) -> Result<Vec<BenchRecord>, HarnessError> {
    let mut records = jobs
        .par_iter()
        .map(|job| run_job(job, model, timeout))
        .collect::<Result<Vec<_>, _>>()?;
    records.sort_by(|a, b| (&a.instance, a.seed).cmp(&(&b.instance, b.seed)));
    Ok(records)
}
