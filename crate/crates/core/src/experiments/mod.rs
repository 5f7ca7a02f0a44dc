//! Seeded batch runs of both planners over a grid of confidence levels and
//! noise levels, with the aggregate tables and trend checks built from them.
//!
//! Each run's seed is a hash of the base seed, the planner configuration, the
//! noise level and the run index, so every cell draws its own samples.

mod io;
mod stats;
mod trend;

pub use io::{
    read_jsonl, write_jsonl, write_table1_csv, write_table2_csv, TABLE1_HEADER, TABLE2_HEADER,
};
pub use stats::{aggregate, AlphaMin, BatchStats, Welford};
pub use trend::{trend_report, Finding, TimeRatio, TrendReport, Verdict};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gridworld::BenchmarkScenario;
use crate::planner::{
    Algorithm, FailureReason, PlanError, Planner, PlannerParams, SigmaSchedule, Status,
};
use crate::risk::SegmentCost;
use crate::rng::derive_seed;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SweepConfig<T> {
    pub alphas: Vec<T>,
    pub sigmas: Vec<T>,
    pub runs_per_cell: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub scenario: BenchmarkScenario<T>,
    pub params: PlannerParams<T>,
    /// Thread count; `None` uses the global pool. Results never depend on it.
    pub workers: Option<usize>,
}

impl<T: Real> SweepConfig<T> {
    /// The 50-run grid over alpha in {0.1, 0.5, 0.9} and
    /// sigma in {0.01, 0.05, 0.1, 0.5} on `scenario`.
    pub fn standard(scenario: BenchmarkScenario<T>, base_seed: u64) -> Self {
        let params = PlannerParams::for_scenario(&scenario);
        SweepConfig {
            alphas: [0.1, 0.5, 0.9].map(T::lit).to_vec(),
            sigmas: [0.01, 0.05, 0.1, 0.5].map(T::lit).to_vec(),
            runs_per_cell: 50,
            base_seed,
            algorithms: vec![Algorithm::RrtStar, Algorithm::RaRrtStar],
            scenario,
            params,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.runs_per_cell < 1 {
            return Err("runs_per_cell must be >= 1".into());
        }
        if self.algorithms.is_empty() {
            return Err("at least one algorithm is required".into());
        }
        if self.sigmas.is_empty()
            || self
                .sigmas
                .iter()
                .any(|s| !(s.is_finite() && *s >= T::zero()))
        {
            return Err("sigmas must be a non-empty list of values >= 0".into());
        }
        let ra = self.algorithms.contains(&Algorithm::RaRrtStar);
        if ra && self.alphas.is_empty() {
            return Err("alphas must be non-empty when ra_rrt_star is swept".into());
        }
        if self
            .alphas
            .iter()
            .any(|a| !(*a > T::zero() && *a < T::one()))
        {
            return Err("alphas must lie in (0, 1)".into());
        }
        if self.workers == Some(0) {
            return Err("workers must be >= 1".into());
        }
        self.scenario.validate().map_err(|e| e.to_string())?;
        self.params.validate()
    }

    /// Cells in output order: algorithm, then alpha, then sigma. The baseline
    /// ignores alpha and gets one cell per sigma.
    pub fn cells(&self) -> Vec<Cell<T>> {
        let mut algorithms = self.algorithms.clone();
        algorithms.sort();
        algorithms.dedup();
        let mut alphas = self.alphas.clone();
        alphas.sort_by(|a, b| a.partial_cmp(b).expect("finite alpha"));
        alphas.dedup();
        let mut sigmas = self.sigmas.clone();
        sigmas.sort_by(|a, b| a.partial_cmp(b).expect("finite sigma"));
        sigmas.dedup();
        let mut out = Vec::new();
        for algorithm in algorithms {
            let levels: Vec<Option<T>> = match algorithm {
                Algorithm::RrtStar => vec![None],
                Algorithm::RaRrtStar => alphas.iter().copied().map(Some).collect(),
            };
            for alpha in levels {
                for &sigma in &sigmas {
                    out.push(Cell {
                        algorithm,
                        alpha,
                        sigma,
                    });
                }
            }
        }
        out
    }

    /// Alpha levels reported in the min-statistics: the swept ones plus 0.1 and 0.9.
    pub fn report_alphas(&self) -> Vec<f64> {
        report_alphas(self.alphas.iter().map(|a| a.as_f64()))
    }

    fn cell_params(&self, cell: &Cell<T>) -> PlannerParams<T> {
        let mut p = self.params.clone();
        p.sigma_schedule = SigmaSchedule::Constant(cell.sigma);
        if let Some(a) = cell.alpha {
            p.risk.alpha = a;
        }
        p
    }
}

pub(crate) fn report_alphas(swept: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = swept.chain([0.1, 0.9]).collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite alpha"));
    v.dedup();
    v
}

/// One (planner configuration, noise level) combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell<T> {
    pub algorithm: Algorithm,
    pub alpha: Option<T>,
    pub sigma: T,
}

/// Seed of run `run_index` of a cell. The baseline has no alpha.
pub fn run_seed(
    base_seed: u64,
    algorithm: Algorithm,
    alpha: Option<f64>,
    sigma: f64,
    run_index: usize,
) -> u64 {
    let alg = match algorithm {
        Algorithm::RrtStar => 0,
        Algorithm::RaRrtStar => 1,
    };
    let alpha = alpha.map_or(u64::MAX, f64::to_bits);
    derive_seed(base_seed, &[alg, alpha, sigma.to_bits(), run_index as u64])
}

/// Everything persisted about one run; enough to recompute all statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RunRecord<T> {
    pub algorithm: Algorithm,
    pub alpha: Option<T>,
    pub sigma: T,
    pub run_index: usize,
    pub seed: u64,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_reason: Option<FailureReason>,
    pub iterations: usize,
    pub node_count: usize,
    /// Euclidean length of the returned path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<T>,
    /// Sum of segment CVaRs at the planning alpha (0.1 for the baseline).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_cvar: Option<T>,
    pub segments: Vec<SegmentCost<T>>,
    pub samples_drawn: usize,
    pub collision_tests: usize,
    pub cvar_evaluations: usize,
    pub rewires: usize,
    pub memory_bytes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl<T: Real> RunRecord<T> {
    pub fn cell(&self) -> Cell<T> {
        Cell {
            algorithm: self.algorithm,
            alpha: self.alpha,
            sigma: self.sigma,
        }
    }
}

/// Per-run records plus one aggregate per cell, both in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub records: Vec<RunRecord<T>>,
    pub cells: Vec<BatchStats>,
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("thread pool: {0}")]
    Pool(String),
}

fn execute<T: Real>(
    cfg: &SweepConfig<T>,
    cells: &[Cell<T>],
    record_time: bool,
) -> Result<Vec<RunRecord<T>>, ExperimentError> {
    cfg.validate().map_err(ExperimentError::Config)?;
    let planners = cells
        .iter()
        .map(|cell| {
            let mut p = cfg.cell_params(cell);
            p.record_time = record_time;
            p.record_tree = false;
            Planner::new(cfg.scenario.env.clone(), p)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.runs_per_cell).map(move |r| (c, r)))
        .collect();
    let run = |&(c, r): &(usize, usize)| -> Result<RunRecord<T>, PlanError> {
        let cell = &cells[c];
        let seed = run_seed(
            cfg.base_seed,
            cell.algorithm,
            cell.alpha.map(T::as_f64),
            cell.sigma.as_f64(),
            r,
        );
        let out = planners[c].plan(cfg.scenario.start, cfg.scenario.goal, cell.algorithm, seed)?;
        let (success, failure_reason, length, total_cvar, segments) = match &out.status {
            Status::Success { path } => (
                true,
                None,
                Some(path.total_euclidean),
                Some(path.total_cvar),
                path.segment_costs(),
            ),
            Status::Failure { reason } => (false, Some(*reason), None, None, Vec::new()),
        };
        Ok(RunRecord {
            algorithm: cell.algorithm,
            alpha: cell.alpha,
            sigma: cell.sigma,
            run_index: r,
            seed,
            success,
            failure_reason,
            iterations: out.iterations,
            node_count: out.node_count,
            length,
            total_cvar,
            segments,
            samples_drawn: out.counters.samples_drawn,
            collision_tests: out.counters.collision_tests,
            cvar_evaluations: out.counters.cvar_evaluations,
            rewires: out.counters.rewires,
            memory_bytes: out.memory_bytes,
            wall_time_s: out.wall_time_s,
        })
    };
    let collect = || jobs.par_iter().map(run).collect::<Result<Vec<_>, _>>();
    let records = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ExperimentError::Pool(e.to_string()))?
            .install(collect),
        None => collect(),
    }?;
    Ok(records)
}

/// Runs one cell and aggregates it.
pub fn run_cell<T: Real>(
    cfg: &SweepConfig<T>,
    algorithm: Algorithm,
    alpha: Option<T>,
    sigma: T,
    record_time: bool,
) -> Result<(Vec<RunRecord<T>>, BatchStats), ExperimentError> {
    let cell = Cell {
        algorithm,
        alpha,
        sigma,
    };
    let records = execute(cfg, &[cell], record_time)?;
    let stats = aggregate(&records, &cfg.report_alphas());
    Ok((records, stats.into_iter().next().expect("one cell")))
}

/// Runs every cell. Worst-case columns of each row are taken from the
/// largest-sigma cell of the same planner configuration.
pub fn sweep<T: Real>(
    cfg: &SweepConfig<T>,
    record_time: bool,
) -> Result<SweepResult<T>, ExperimentError> {
    cfg.validate().map_err(ExperimentError::Config)?;
    let records = execute(cfg, &cfg.cells(), record_time)?;
    let cells = aggregate(&records, &cfg.report_alphas());
    Ok(SweepResult { records, cells })
}
