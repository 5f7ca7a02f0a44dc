use std::io::{self, BufRead, Write};

use super::{BatchStats, RunRecord};
use crate::scalar::Real;

pub const TABLE1_HEADER: [&str; 9] = [
    "algorithm",
    "alpha",
    "sigma",
    "mean_len",
    "var_len",
    "failure_rate",
    "mean_time",
    "worst_mean",
    "worst_var",
];

pub const TABLE2_HEADER: [&str; 7] = [
    "algorithm",
    "alpha",
    "min_var_0.1",
    "min_var_0.9",
    "min_cvar_0.1",
    "min_cvar_0.9",
    "min_expected",
];

/// Marker for statistics without any successful run behind them.
const UNDEFINED: &str = "NA";

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |x| x.to_string())
}

/// One JSON object per line.
pub fn write_jsonl<T: Real, W: Write>(records: &[RunRecord<T>], mut w: W) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_jsonl<T: Real, R: BufRead>(r: R) -> Result<Vec<RunRecord<T>>, String> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| format!("line {}: {e}", i + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    Ok(out)
}

/// Path lengths and failure rates, one row per cell.
pub fn write_table1_csv<W: Write>(cells: &[BatchStats], w: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TABLE1_HEADER)?;
    for c in cells {
        out.write_record([
            c.algorithm.name().to_string(),
            c.alpha.map_or_else(String::new, |a| a.to_string()),
            c.sigma.to_string(),
            num(c.mean_length),
            num(c.var_length),
            c.failure_rate.to_string(),
            num(c.mean_time),
            num(c.worst_case_mean),
            num(c.worst_case_var),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Min-statistics at the largest sigma, one row per planner configuration.
pub fn write_table2_csv<W: Write>(cells: &[BatchStats], w: W) -> Result<(), csv::Error> {
    let max_sigma = cells
        .iter()
        .map(|c| c.sigma)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TABLE2_HEADER)?;
    for c in cells.iter().filter(|c| c.sigma == max_sigma) {
        let var = |a: f64| num(c.min_at(a).and_then(|m| m.min_var));
        let cvar = |a: f64| num(c.min_at(a).and_then(|m| m.min_cvar));
        out.write_record([
            c.algorithm.name().to_string(),
            c.alpha.map_or_else(String::new, |a| a.to_string()),
            var(0.1),
            var(0.9),
            cvar(0.1),
            cvar(0.9),
            num(c.min_expected),
        ])?;
    }
    out.flush()?;
    Ok(())
}
