//! Command-line front end: `plan`, `benchmark`, `verify-bound` and `render`.
//!
//! [`run`] parses arguments and returns the process exit code; it never
//! panics on bad input. Exit codes are 0 on success, 1 on configuration or
//! I/O errors and 2 when the planner fails to reach the goal.

pub mod args;
mod benchmark;
mod bound;
mod plan;
mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::Parser;
use riskplan::gridworld::BenchmarkScenario;
use riskplan::{build_benchmark_scenario, Scenario};
use serde::Serialize;

use args::{Cli, Command, Common};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PLAN_FAILED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_CONFIG
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Plan(a) => plan::run(a, out),
        Command::Benchmark(a) => benchmark::run(a, out),
        Command::VerifyBound(a) => bound::run(a, out),
        Command::Render(a) => render::run(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Loads and validates the scenario, or builds the default benchmark.
pub fn load_scenario(path: Option<&Path>) -> Result<Scenario> {
    match path {
        None => build_benchmark_scenario(None).map_err(|e| CliError::Config(e.to_string())),
        Some(p) => {
            let text = read_text(p)?;
            BenchmarkScenario::from_json(&text)
                .map_err(|e| CliError::Config(format!("scenario {}: {e}", p.display())))
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn output_dir(common: &Common) -> Result<&Path> {
    fs::create_dir_all(&common.output).map_err(|e| CliError::io(&common.output, e))?;
    Ok(&common.output)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Pretty JSON with an optional top-level `created` field (Unix seconds).
fn to_json_document<T: Serialize>(value: &T, common: &Common) -> Result<Vec<u8>> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::Config(e.to_string()))?;
    if !common.no_timestamp {
        if let serde_json::Value::Object(map) = &mut v {
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            map.insert("created".into(), now.into());
        }
    }
    let mut bytes = serde_json::to_vec_pretty(&v).map_err(|e| CliError::Config(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write_json<T: Serialize>(path: &Path, value: &T, common: &Common) -> Result<()> {
    write_file(path, &to_json_document(value, common)?)
}
