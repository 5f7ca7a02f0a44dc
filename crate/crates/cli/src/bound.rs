use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use riskplan::experiments::read_jsonl;
use riskplan::rng::stream;
use riskplan::{
    expectation_bound, markov_upper_bound, worst_case_path_length, Algorithm, GuaranteeInputs,
    PlanOutcome, RunRecord, SegmentCost,
};
use serde::Serialize;

use crate::args::{Format, VerifyArgs};
use crate::{output_dir, read_text, write_file, write_json, CliError, Result, EXIT_OK};

pub const BOUND_JSON_FILE: &str = "bound.json";
pub const BOUND_CSV_FILE: &str = "bound.csv";

/// Alpha used for benchmark results when none is given.
const RESULTS_ALPHA: f64 = 0.1;

#[derive(Debug, Serialize)]
struct Replay {
    trials: usize,
    exceedances: usize,
    frequency: f64,
    within_bound: bool,
}

#[derive(Debug, Serialize)]
struct BoundReport {
    input: String,
    source: &'static str,
    algorithm: Algorithm,
    alpha: f64,
    segments: usize,
    cvar_sum: f64,
    expected_length: f64,
    l_max: f64,
    delta: f64,
    epsilon: f64,
    markov_raw: f64,
    markov_clamped: f64,
    vacuous: bool,
    expectation_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    replay: Option<Replay>,
}

struct Best {
    source: &'static str,
    algorithm: Algorithm,
    alpha: f64,
    segments: Vec<SegmentCost>,
}

fn config(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

/// The successful path with the smallest CVaR sum in a plan outcome or
/// benchmark results file.
fn best_path(text: &str, a: &VerifyArgs) -> Result<Best> {
    let outcome_err = match serde_json::from_str::<PlanOutcome>(text) {
        Ok(o) => {
            let path = o
                .path()
                .ok_or_else(|| config("plan outcome holds no path"))?;
            return Ok(Best {
                source: "plan",
                algorithm: o.algorithm,
                alpha: a.alpha.unwrap_or(o.alpha),
                segments: path.segment_costs(),
            });
        }
        Err(e) => e,
    };
    let records: Vec<RunRecord<f64>> = read_jsonl(text.as_bytes()).map_err(|e| {
        config(format!(
            "neither a plan outcome ({outcome_err}) nor benchmark results ({e})"
        ))
    })?;
    let algorithm: Algorithm = a.algorithm.into();
    let alpha = a.alpha.unwrap_or(RESULTS_ALPHA);
    let mut best: Option<(f64, &RunRecord<f64>)> = None;
    for r in records
        .iter()
        .filter(|r| r.success && r.algorithm == algorithm)
    {
        let total = worst_case_path_length(&r.segments, alpha).map_err(config)?;
        if best.is_none_or(|(b, _)| total < b) {
            best = Some((total, r));
        }
    }
    let (_, r) =
        best.ok_or_else(|| config(format!("results hold no successful {algorithm} run")))?;
    Ok(Best {
        source: "benchmark",
        algorithm,
        alpha,
        segments: r.segments.clone(),
    })
}

/// How often independent draws of the path length reach `l_max`.
fn replay(segments: &[SegmentCost], l_max: f64, trials: usize, seed: u64) -> usize {
    let mut rng = stream(seed, &[0x5245_504c]);
    (0..trials)
        .filter(|_| {
            let len: f64 = segments
                .iter()
                .map(|s| s.c + s.sigma * rng.sample::<f64, _>(StandardNormal))
                .sum();
            len >= l_max
        })
        .count()
}

pub fn run(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let text = read_text(&a.input)?;
    let best = best_path(&text, a).map_err(|e| match e {
        CliError::Config(m) => config(format!("{}: {m}", a.input.display())),
        other => other,
    })?;
    let cvar_sum = worst_case_path_length(&best.segments, best.alpha).map_err(config)?;
    let g = GuaranteeInputs {
        cvar_sum,
        l_max: a.l_max,
        delta: a.delta,
        epsilon: a.epsilon,
        alpha: best.alpha,
    };
    let markov = markov_upper_bound(&g).map_err(config)?;
    let expectation = expectation_bound(&g).map_err(config)?;
    let replay = (a.trials > 0).then(|| {
        let exceedances = replay(&best.segments, a.l_max, a.trials, a.common.seed);
        let frequency = exceedances as f64 / a.trials as f64;
        Replay {
            trials: a.trials,
            exceedances,
            frequency,
            within_bound: frequency <= markov.raw,
        }
    });
    let report = BoundReport {
        input: a.input.display().to_string(),
        source: best.source,
        algorithm: best.algorithm,
        alpha: best.alpha,
        segments: best.segments.len(),
        cvar_sum,
        expected_length: best.segments.iter().map(|s| s.c).sum(),
        l_max: a.l_max,
        delta: a.delta,
        epsilon: a.epsilon,
        markov_raw: markov.raw,
        markov_clamped: markov.clamped,
        vacuous: markov.is_vacuous(),
        expectation_bound: expectation,
        replay,
    };

    let _ = writeln!(
        out,
        "CVaR sum {:.6} over {} segments at alpha {}",
        report.cvar_sum, report.segments, report.alpha
    );
    let _ = writeln!(
        out,
        "P(L >= {}) <= {:.6} (clamped {:.6})",
        report.l_max, report.markov_raw, report.markov_clamped
    );
    if report.vacuous {
        let _ = writeln!(
            out,
            "note: the bound is vacuous, it is not below 1 at this L_max"
        );
    }
    let _ = writeln!(out, "E[L] <= {:.6}", report.expectation_bound);
    if let Some(r) = &report.replay {
        let _ = writeln!(
            out,
            "replay: {} of {} trials reached L_max (frequency {:.6}), {} the bound",
            r.exceedances,
            r.trials,
            r.frequency,
            if r.within_bound { "within" } else { "above" }
        );
    }

    let dir = output_dir(&a.common)?;
    match a.common.format {
        Format::Json => write_json(&dir.join(BOUND_JSON_FILE), &report, &a.common)?,
        Format::Csv => {
            let value = serde_json::to_value(&report).map_err(config)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"]).map_err(config)?;
            if let serde_json::Value::Object(map) = value {
                for (k, v) in map {
                    match v {
                        serde_json::Value::Object(inner) => {
                            for (ik, iv) in inner {
                                w.write_record([format!("{k}.{ik}"), scalar(&iv)])
                                    .map_err(config)?;
                            }
                        }
                        other => w.write_record([k, scalar(&other)]).map_err(config)?,
                    }
                }
            }
            let bytes = w.into_inner().map_err(config)?;
            write_file(&dir.join(BOUND_CSV_FILE), &bytes)?;
        }
    }
    Ok(EXIT_OK)
}

fn scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
