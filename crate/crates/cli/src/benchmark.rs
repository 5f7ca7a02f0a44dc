use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use riskplan::experiments::{
    aggregate, read_jsonl, write_jsonl, write_table1_csv, write_table2_csv, BatchStats, Verdict,
};
use riskplan::{sweep, trend_report, RunRecord, SweepConfig};
use serde::Serialize;

use crate::args::{BenchmarkArgs, Format};
use crate::{load_scenario, output_dir, write_file, write_json, CliError, Result, EXIT_OK};

pub const RESULTS_FILE: &str = "results.jsonl";
pub const TABLE1_FILE: &str = "table1.csv";
pub const TABLE2_FILE: &str = "table2.csv";
pub const FINDINGS_FILE: &str = "findings.json";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn run(a: &BenchmarkArgs, out: &mut dyn Write) -> Result<i32> {
    let dir = output_dir(&a.common)?;
    let results = dir.join(RESULTS_FILE);
    let cfg = config(a)?;

    let records: Vec<RunRecord<f64>> = if a.recompute_only {
        let f = File::open(&results).map_err(|e| CliError::Io {
            path: results.clone(),
            source: e,
        })?;
        read_jsonl(BufReader::new(f))
            .map_err(|e| CliError::Config(format!("{}: {e}", results.display())))?
    } else {
        let res =
            sweep(&cfg, !a.common.no_timestamp).map_err(|e| CliError::Config(e.to_string()))?;
        let mut buf = Vec::new();
        write_jsonl(&res.records, &mut buf).map_err(|e| CliError::Config(e.to_string()))?;
        write_file(&results, &buf)?;
        res.records
    };
    if records.is_empty() {
        return Err(CliError::Config(format!("{}: no runs", results.display())));
    }

    let cells = aggregate(&records, &cfg.report_alphas());
    write_summaries(a, dir, &cells)?;
    let report = trend_report(&cells);
    let passed = report
        .findings
        .iter()
        .filter(|f| f.verdict.passed())
        .count();
    let failures: usize = cells.iter().map(|c| c.failures).sum();
    let _ = writeln!(
        out,
        "{} runs in {} cells, {failures} failures; trends {passed}/{} hold",
        records.len(),
        cells.len(),
        report.findings.len()
    );
    for f in &report.findings {
        let _ = writeln!(
            out,
            "  {:9} {} (alpha {}, sigma {}): ra {} vs rrt* {}",
            verdict_label(f.verdict),
            f.claim,
            f.alpha,
            f.sigma,
            fmt_opt(f.ra),
            fmt_opt(f.baseline)
        );
    }
    write_json(&dir.join(FINDINGS_FILE), &report, &a.common)?;
    Ok(EXIT_OK)
}

fn config(a: &BenchmarkArgs) -> Result<SweepConfig<f64>> {
    let scenario = load_scenario(a.common.scenario.as_deref())?;
    let mut cfg = SweepConfig::standard(scenario, a.common.seed);
    cfg.alphas = a.alpha.clone();
    cfg.sigmas = a.sigma.clone();
    cfg.runs_per_cell = a.runs;
    cfg.workers = a.workers;
    a.params.apply(&mut cfg.params);
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

#[derive(Serialize)]
struct Summary<'a> {
    cells: &'a [BatchStats],
}

fn write_summaries(a: &BenchmarkArgs, dir: &Path, cells: &[BatchStats]) -> Result<()> {
    let csv_err = |e: csv::Error| CliError::Config(e.to_string());
    let mut t1 = Vec::new();
    write_table1_csv(cells, &mut t1).map_err(csv_err)?;
    write_file(&dir.join(TABLE1_FILE), &t1)?;
    let mut t2 = Vec::new();
    write_table2_csv(cells, &mut t2).map_err(csv_err)?;
    write_file(&dir.join(TABLE2_FILE), &t2)?;
    if a.common.format == Format::Json {
        write_json(&dir.join(SUMMARY_FILE), &Summary { cells }, &a.common)?;
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("NA".into(), |x| format!("{x:.4}"))
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::PassWeak => "tie",
        Verdict::Fail => "fail",
        Verdict::Undefined => "undefined",
    }
}
