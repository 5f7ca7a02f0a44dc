use std::io::Write;

use riskplan::{Algorithm, Planner, PlannerParams};

use crate::args::{Format, PlanArgs};
use crate::{load_scenario, output_dir, write_file, write_json, CliError, Result};
use crate::{EXIT_OK, EXIT_PLAN_FAILED};

pub const OUTCOME_FILE: &str = "outcome.json";
pub const PATH_CSV_FILE: &str = "path.csv";

pub fn run(a: &PlanArgs, out: &mut dyn Write) -> Result<i32> {
    let scenario = load_scenario(a.common.scenario.as_deref())?;
    let mut params = PlannerParams::for_scenario(&scenario);
    a.apply(&mut params);
    let algorithm: Algorithm = a.algorithm.into();
    let planner =
        Planner::new(scenario.env.clone(), params).map_err(|e| CliError::Config(e.to_string()))?;
    let outcome = planner
        .plan(scenario.start, scenario.goal, algorithm, a.common.seed)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let dir = output_dir(&a.common)?;
    write_json(&dir.join(OUTCOME_FILE), &outcome, &a.common)?;
    if a.common.format == Format::Csv {
        if let Some(path) = outcome.path() {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Config(e.to_string());
            w.write_record(["index", "x", "y", "c", "sigma", "var", "cvar"])
                .map_err(io)?;
            for (i, q) in path.waypoints.iter().enumerate() {
                let mut row = vec![i.to_string(), q.x.to_string(), q.y.to_string()];
                match i.checked_sub(1).and_then(|k| path.segments.get(k)) {
                    Some(s) => row.extend([s.c, s.sigma, s.var, s.cvar].map(|v| v.to_string())),
                    None => row.extend(std::iter::repeat_n(String::new(), 4)),
                }
                w.write_record(&row).map_err(io)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Config(e.to_string()))?;
            write_file(&dir.join(PATH_CSV_FILE), &bytes)?;
        }
    }

    let time = outcome
        .wall_time_s
        .map_or("n/a".to_string(), |t| format!("{t:.3}s"));
    let _ = match outcome.path() {
        Some(p) => writeln!(
            out,
            "{algorithm} success: length {:.4} m, CVaR total {:.4} m, {} iterations, {} nodes, time {time}",
            p.total_euclidean, p.total_cvar, outcome.iterations, outcome.node_count
        ),
        None => writeln!(
            out,
            "{algorithm} failure: goal not reached in {} iterations, {} nodes, time {time}",
            outcome.iterations, outcome.node_count
        ),
    };
    Ok(if outcome.is_success() {
        EXIT_OK
    } else {
        EXIT_PLAN_FAILED
    })
}
