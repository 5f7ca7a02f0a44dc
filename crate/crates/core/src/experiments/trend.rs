use serde::{Deserialize, Serialize};

use super::BatchStats;
use crate::planner::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Both planners measured the same value.
    PassWeak,
    Fail,
    /// A statistic is missing, e.g. every run failed.
    Undefined,
}

impl Verdict {
    /// `ra <= baseline`, with exact ties reported separately.
    pub fn at_most(ra: Option<f64>, baseline: Option<f64>) -> Verdict {
        match (ra, baseline) {
            (Some(a), Some(b)) if a < b => Verdict::Pass,
            (Some(a), Some(b)) if a == b => Verdict::PassWeak,
            (Some(_), Some(_)) => Verdict::Fail,
            _ => Verdict::Undefined,
        }
    }

    pub fn passed(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::PassWeak)
    }
}

/// One expected ordering between the risk-aware planner and the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub claim: String,
    pub alpha: f64,
    pub sigma: f64,
    pub ra: Option<f64>,
    pub baseline: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeRatio {
    pub alpha: f64,
    pub sigma: f64,
    /// Mean risk-aware time over mean baseline time.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub findings: Vec<Finding>,
    pub time_ratios: Vec<TimeRatio>,
}

impl TrendReport {
    pub fn all_passed(&self) -> bool {
        self.findings.iter().all(|f| f.verdict.passed())
    }
}

/// Compares every risk-aware cell with the baseline cell at the same sigma:
/// failure rate and length variance at every sigma, and worst-case mean,
/// worst-case variance, min CVaR at 0.1 and min expected length at the
/// largest sigma.
pub fn trend_report(cells: &[BatchStats]) -> TrendReport {
    let max_sigma = cells
        .iter()
        .map(|c| c.sigma)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut findings = Vec::new();
    let mut time_ratios = Vec::new();
    for ra in cells.iter().filter(|c| c.algorithm == Algorithm::RaRrtStar) {
        let Some(base) = cells
            .iter()
            .find(|c| c.algorithm == Algorithm::RrtStar && c.sigma == ra.sigma)
        else {
            continue;
        };
        let alpha = ra.alpha.unwrap_or(f64::NAN);
        let mut push = |claim: &str, a: Option<f64>, b: Option<f64>| {
            findings.push(Finding {
                claim: claim.into(),
                alpha,
                sigma: ra.sigma,
                ra: a,
                baseline: b,
                verdict: Verdict::at_most(a, b),
            })
        };
        push(
            "failure_rate",
            Some(ra.failure_rate),
            Some(base.failure_rate),
        );
        push("var_length", ra.var_length, base.var_length);
        if ra.sigma == max_sigma {
            push("worst_case_mean", ra.worst_case_mean, base.worst_case_mean);
            push("worst_case_var", ra.worst_case_var, base.worst_case_var);
            let cvar01 = |c: &BatchStats| c.min_at(0.1).and_then(|m| m.min_cvar);
            push("min_cvar_0.1", cvar01(ra), cvar01(base));
            push("min_expected", ra.min_expected, base.min_expected);
        }
        let ratio = match (ra.mean_time, base.mean_time) {
            (Some(a), Some(b)) if b > 0.0 => Some(a / b),
            _ => None,
        };
        time_ratios.push(TimeRatio {
            alpha,
            sigma: ra.sigma,
            ratio,
        });
    }
    TrendReport {
        findings,
        time_ratios,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::AlphaMin;

    fn cell(
        algorithm: Algorithm,
        alpha: Option<f64>,
        failure_rate: f64,
        mean_time: f64,
    ) -> BatchStats {
        BatchStats {
            algorithm,
            alpha,
            sigma: 0.01,
            runs: 50,
            failures: (failure_rate * 50.0).round() as usize,
            failure_rate,
            mean_length: Some(5.29),
            var_length: Some(0.1),
            mean_time: Some(mean_time),
            median_time: Some(mean_time),
            worst_case_mean: Some(5.3),
            worst_case_var: Some(0.1),
            min_by_alpha: vec![AlphaMin {
                alpha: 0.1,
                min_var: Some(4.0),
                min_cvar: Some(6.0),
            }],
            min_expected: Some(5.0),
        }
    }

    #[test]
    fn failure_trend_and_time_ratio() {
        let cells = [
            cell(Algorithm::RrtStar, None, 0.16, 0.0143),
            cell(Algorithm::RaRrtStar, Some(0.1), 0.06, 0.21),
        ];
        let r = trend_report(&cells);
        let f = r
            .findings
            .iter()
            .find(|f| f.claim == "failure_rate")
            .unwrap();
        assert_eq!(f.verdict, Verdict::Pass);
        assert!((r.time_ratios[0].ratio.unwrap() - 14.685).abs() < 1e-3);
    }

    #[test]
    fn equal_stats_are_weak_passes() {
        let cells = [
            cell(Algorithm::RrtStar, None, 0.1, 1.0),
            cell(Algorithm::RaRrtStar, Some(0.1), 0.1, 1.0),
        ];
        let r = trend_report(&cells);
        assert!(r.findings.iter().all(|f| f.verdict == Verdict::PassWeak));
        assert!(r.all_passed());
    }
}
