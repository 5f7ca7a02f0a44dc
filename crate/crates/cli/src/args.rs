use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use riskplan::{Algorithm, ParentRule, PlannerParams, SigmaSchedule};

#[derive(Debug, Parser)]
#[command(
    name = "riskplan",
    version,
    about = "Risk-aware RRT* planning with Gaussian segment-length noise",
    long_about = "Plans paths whose segment lengths are the Euclidean length plus zero-mean \
                  Gaussian noise, comparing RRT* with a risk-aware RRT* that picks each new \
                  node's parent by minimum empirical CVaR.\n\n\
                  Exit codes: 0 success, 1 configuration or I/O error, 2 planner failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan one start-goal query and write the outcome as JSON.
    Plan(PlanArgs),
    /// Run the seeded sweep over alpha and sigma for both planners.
    Benchmark(BenchmarkArgs),
    /// Exceedance and expectation bounds for the best path of a result file.
    VerifyBound(VerifyArgs),
    /// Draw a plan outcome over its scenario as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    RrtStar,
    RaRrtStar,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::RrtStar => Algorithm::RrtStar,
            AlgorithmArg::RaRrtStar => Algorithm::RaRrtStar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParentRuleArg {
    Nearest,
    MinSegment,
    MinCostToCome,
}

impl From<ParentRuleArg> for ParentRule {
    fn from(p: ParentRuleArg) -> Self {
        match p {
            ParentRuleArg::Nearest => ParentRule::Nearest,
            ParentRuleArg::MinSegment => ParentRule::MinSegment,
            ParentRuleArg::MinCostToCome => ParentRule::MinCostToCome,
        }
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Scenario JSON: environment plus `start` and `goal`. Defaults to the
    /// built-in 5 m benchmark.
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Base seed of every random stream.
    #[arg(long, env = "RISKPLAN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Directory for output files; created if missing.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Leave out the creation timestamp and wall-clock timings, so reruns
    /// with equal inputs write byte-identical files.
    #[arg(long)]
    pub no_timestamp: bool,
}

/// Planner parameters. Unset values keep the scenario defaults.
#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Iteration cap n_max.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Neighbor count k_n considered for parent selection.
    #[arg(long)]
    pub k_n: Option<usize>,
    /// Neighbor ball radius R_m.
    #[arg(long, allow_negative_numbers = true)]
    pub r_m: Option<f64>,
    /// Cap rho_max on the shrinking rewire radius.
    #[arg(long, allow_negative_numbers = true)]
    pub rho_max: Option<f64>,
    /// Rewire radius constant gamma in gamma (log n / n)^(1/2).
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Draws n_c per segment for the empirical CVaR.
    #[arg(long)]
    pub n_c: Option<usize>,
    /// Goal region radius.
    #[arg(long, allow_negative_numbers = true)]
    pub goal_tol: Option<f64>,
    /// Vertex count m of the polygon covering each circular obstacle.
    #[arg(long)]
    pub approx_vertices: Option<usize>,
    /// Maximum extension per steer (continuous scenarios).
    #[arg(long, allow_negative_numbers = true)]
    pub steer_step: Option<f64>,
    /// Probability of sampling the goal.
    #[arg(long, allow_negative_numbers = true)]
    pub goal_bias: Option<f64>,
    /// Parent rule of the baseline planner.
    #[arg(long, value_enum)]
    pub parent_rule: Option<ParentRuleArg>,
    /// Keep refining after the goal region is first reached.
    #[arg(long)]
    pub continue_after_goal: bool,
}

impl ParamArgs {
    pub fn apply(&self, p: &mut PlannerParams) {
        if let Some(v) = self.n_max {
            p.n_max = v;
        }
        if let Some(v) = self.k_n {
            p.k_n = v;
        }
        if let Some(v) = self.r_m {
            p.neighborhood_radius = v;
        }
        if let Some(v) = self.rho_max {
            p.rho_max = v;
        }
        if let Some(v) = self.gamma {
            p.gamma = v;
        }
        if let Some(v) = self.n_c {
            p.risk.n_c = v;
        }
        if let Some(v) = self.goal_tol {
            p.goal_tolerance = v;
        }
        if let Some(v) = self.approx_vertices {
            p.approx_vertices = v;
        }
        if let Some(v) = self.steer_step {
            p.steer_step = v;
        }
        if let Some(v) = self.goal_bias {
            p.goal_bias = v;
        }
        if let Some(v) = self.parent_rule {
            p.baseline_parent = v.into();
        }
        p.continue_after_goal |= self.continue_after_goal;
    }
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::RaRrtStar)]
    pub algorithm: AlgorithmArg,
    /// Confidence level alpha of the CVaR.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Standard deviation sigma of each segment's length noise.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Do not store the final tree in the outcome.
    #[arg(long)]
    pub no_tree: bool,
}

impl PlanArgs {
    pub fn apply(&self, p: &mut PlannerParams) {
        self.params.apply(p);
        if let Some(a) = self.alpha {
            p.risk.alpha = a;
        }
        if let Some(s) = self.sigma {
            p.sigma_schedule = SigmaSchedule::Constant(s);
        }
        p.record_tree = !self.no_tree;
        p.record_time = !self.common.no_timestamp;
    }
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Confidence levels of the risk-aware cells, comma separated.
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',', default_values_t = [0.1, 0.5, 0.9])]
    pub alpha: Vec<f64>,
    /// Noise levels, comma separated.
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1, 0.5])]
    pub sigma: Vec<f64>,
    /// Runs per (planner, alpha, sigma) cell.
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
    /// Worker threads. Results do not depend on the count.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Rebuild the summaries from an existing results.jsonl without planning.
    #[arg(long)]
    pub recompute_only: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Plan outcome JSON or benchmark results JSONL.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Length threshold L_max.
    #[arg(long, allow_negative_numbers = true)]
    pub l_max: f64,
    /// Tolerance delta of the certified length model.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
    pub delta: f64,
    /// KL budget epsilon.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Confidence level of the CVaR sum. Defaults to the planning alpha of a
    /// plan outcome and to 0.1 for benchmark results.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Planner whose best path is used when reading benchmark results.
    #[arg(long, value_enum, default_value_t = AlgorithmArg::RaRrtStar)]
    pub algorithm: AlgorithmArg,
    /// Monte Carlo replays of the path's segment lengths; 0 skips the check.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub common: Common,
    /// Plan outcome JSON written by `plan`.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Pixels per meter.
    #[arg(long, allow_negative_numbers = true, default_value_t = 100.0)]
    pub scale: f64,
}
