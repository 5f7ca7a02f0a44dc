use serde::{Deserialize, Serialize};

use super::RunRecord;
use crate::planner::Algorithm;
use crate::risk::{cvar_alpha, var_alpha, SegmentCost};
use crate::scalar::Real;

/// Streaming mean and population variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then_some(self.mean)
    }

    /// Population variance (divides by `n`).
    pub fn variance(&self) -> Option<f64> {
        (self.n > 0).then(|| (self.m2 / self.n as f64).max(0.0))
    }
}

/// Smallest path-total VaR and CVaR over a cell's successful runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaMin {
    pub alpha: f64,
    pub min_var: Option<f64>,
    pub min_cvar: Option<f64>,
}

/// Aggregate of one cell. Length, time and min statistics cover successful
/// runs only; `None` marks a statistic with no successful run behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub algorithm: Algorithm,
    pub alpha: Option<f64>,
    pub sigma: f64,
    pub runs: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub mean_length: Option<f64>,
    pub var_length: Option<f64>,
    pub mean_time: Option<f64>,
    pub median_time: Option<f64>,
    /// Mean and variance of path length in the largest-sigma cell of this
    /// planner configuration.
    pub worst_case_mean: Option<f64>,
    pub worst_case_var: Option<f64>,
    pub min_by_alpha: Vec<AlphaMin>,
    /// Smallest expected path length, the sum of segment means.
    pub min_expected: Option<f64>,
}

impl BatchStats {
    pub fn min_at(&self, alpha: f64) -> Option<&AlphaMin> {
        self.min_by_alpha.iter().find(|m| m.alpha == alpha)
    }

    fn same_config(&self, o: &BatchStats) -> bool {
        self.algorithm == o.algorithm && self.alpha == o.alpha
    }
}

fn path_total<T: Real>(segments: &[SegmentCost<T>], f: impl Fn(&SegmentCost<T>) -> f64) -> f64 {
    segments.iter().map(f).sum()
}

fn fmin(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(acc.map_or(x, |a| a.min(x)))
}

fn cell_stats<T: Real>(records: &[&RunRecord<T>], report_alphas: &[f64]) -> BatchStats {
    let first = records[0];
    let failures = records.iter().filter(|r| !r.success).count();
    let mut len = Welford::default();
    let mut time = Welford::default();
    let mut times = Vec::new();
    let mut mins: Vec<AlphaMin> = report_alphas
        .iter()
        .map(|&alpha| AlphaMin {
            alpha,
            min_var: None,
            min_cvar: None,
        })
        .collect();
    let mut min_expected = None;
    for r in records.iter().filter(|r| r.success) {
        let length = r.length.map_or(f64::NAN, T::as_f64);
        len.push(length);
        if let Some(t) = r.wall_time_s {
            time.push(t);
            times.push(t);
        }
        min_expected = fmin(min_expected, path_total(&r.segments, |s| s.c.as_f64()));
        for m in &mut mins {
            let a = T::lit(m.alpha);
            let var = path_total(&r.segments, |s| var_alpha(s, a).map_or(f64::NAN, T::as_f64));
            let cvar = path_total(&r.segments, |s| {
                cvar_alpha(s, a).map_or(f64::NAN, T::as_f64)
            });
            m.min_var = fmin(m.min_var, var);
            m.min_cvar = fmin(m.min_cvar, cvar);
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let median_time = match times.len() {
        0 => None,
        n if n % 2 == 1 => Some(times[n / 2]),
        n => Some(0.5 * (times[n / 2 - 1] + times[n / 2])),
    };
    BatchStats {
        algorithm: first.algorithm,
        alpha: first.alpha.map(T::as_f64),
        sigma: first.sigma.as_f64(),
        runs: records.len(),
        failures,
        failure_rate: failures as f64 / records.len() as f64,
        mean_length: len.mean(),
        var_length: len.variance(),
        mean_time: time.mean(),
        median_time,
        worst_case_mean: len.mean(),
        worst_case_var: len.variance(),
        min_by_alpha: mins,
        min_expected,
    }
}

/// Groups consecutive records by cell, aggregates each group, then copies
/// the largest-sigma cell's length statistics into the worst-case columns
/// of every row of the same planner configuration.
pub fn aggregate<T: Real>(records: &[RunRecord<T>], report_alphas: &[f64]) -> Vec<BatchStats> {
    let mut groups: Vec<Vec<&RunRecord<T>>> = Vec::new();
    for r in records {
        match groups.last_mut() {
            Some(g) if g[0].cell() == r.cell() => g.push(r),
            _ => groups.push(vec![r]),
        }
    }
    let mut cells: Vec<BatchStats> = groups
        .iter()
        .map(|g| cell_stats(g, report_alphas))
        .collect();
    for i in 0..cells.len() {
        let worst = cells
            .iter()
            .filter(|c| c.same_config(&cells[i]))
            .max_by(|a, b| {
                a.sigma
                    .partial_cmp(&b.sigma)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|c| (c.mean_length, c.var_length));
        if let Some((m, v)) = worst {
            cells[i].worst_case_mean = m;
            cells[i].worst_case_var = v;
        }
    }
    cells
}
