use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{Environment, DEFAULT_APPROX_VERTICES};
use crate::gridworld::{BenchmarkScenario, GridMotionModel};
use crate::risk::RiskParams;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    RrtStar,
    RaRrtStar,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RrtStar => "rrt_star",
            Algorithm::RaRrtStar => "ra_rrt_star",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "rrt_star" | "rrt*" | "rrt" => Ok(Algorithm::RrtStar),
            "ra_rrt_star" | "ra_rrt*" | "ra" => Ok(Algorithm::RaRrtStar),
            other => Err(format!(
                "unknown algorithm '{other}' (expected rrt_star or ra_rrt_star)"
            )),
        }
    }
}

/// How the baseline picks the parent of a new node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParentRule {
    /// The node the sample was steered from.
    #[default]
    Nearest,
    /// Shortest connecting segment among the `k_n` neighbors.
    MinSegment,
    /// Lowest cost-to-come through the connecting segment among the neighbors.
    MinCostToCome,
}

/// Noise level of the segment length at each iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSchedule<T> {
    Constant(T),
    /// One value per iteration; the last value repeats past the end.
    PerIteration(Vec<T>),
}

impl<T: Real> SigmaSchedule<T> {
    pub fn at(&self, k: usize) -> T {
        match self {
            SigmaSchedule::Constant(s) => *s,
            SigmaSchedule::PerIteration(v) => v.get(k).or(v.last()).copied().unwrap_or(T::zero()),
        }
    }

    pub fn max(&self) -> T {
        match self {
            SigmaSchedule::Constant(s) => *s,
            SigmaSchedule::PerIteration(v) => v.iter().copied().fold(T::zero(), T::max),
        }
    }

    fn validate(&self) -> Result<(), String> {
        let ok = |s: &T| s.is_finite() && *s >= T::zero();
        let good = match self {
            SigmaSchedule::Constant(s) => ok(s),
            SigmaSchedule::PerIteration(v) => !v.is_empty() && v.iter().all(ok),
        };
        if good {
            Ok(())
        } else {
            Err("sigma_schedule: values must be finite and >= 0".into())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams<T> {
    /// Iteration cap `n_max`.
    pub n_max: usize,
    /// Neighbor ball radius `R_m`.
    pub neighborhood_radius: T,
    pub k_n: usize,
    pub rho_max: T,
    pub gamma: T,
    pub steer_step: T,
    pub goal_tolerance: T,
    /// Probability of sampling the goal itself.
    pub goal_bias: T,
    pub risk: RiskParams<T>,
    pub sigma_schedule: SigmaSchedule<T>,
    pub baseline_parent: ParentRule,
    /// Keep refining after the goal region is first reached.
    pub continue_after_goal: bool,
    /// Half-width of a sampling window centered on the last added node.
    pub sample_window: Option<T>,
    /// Polygon vertex count for non-convex obstacle covers.
    pub approx_vertices: usize,
    /// Lattice constraint; `None` plans in the continuum.
    pub grid: Option<GridMotionModel<T>>,
    /// Store the final tree in the outcome.
    pub record_tree: bool,
    /// Measure wall time. Off makes outcomes byte-reproducible.
    pub record_time: bool,
}

pub const DEFAULT_GOAL_TOLERANCE: f64 = 0.15;
pub const DEFAULT_GOAL_BIAS: f64 = 0.05;
/// Tuned so that roughly one run in ten fails on the default benchmark.
pub const DEFAULT_N_MAX: usize = 850;
pub const DEFAULT_N_C: usize = 100;

/// `2 sqrt((1 + 1/d) area(free) / pi)` for `d = 2`.
pub fn default_gamma<T: Real>(env: &Environment<T>) -> T {
    let area = env.free_area().as_f64();
    T::lit(2.0 * (1.5 * area / std::f64::consts::PI).sqrt())
}

impl<T: Real> PlannerParams<T> {
    /// Defaults for a continuous-space query in `env`.
    pub fn continuous(env: &Environment<T>) -> Self {
        PlannerParams {
            n_max: DEFAULT_N_MAX,
            neighborhood_radius: T::lit(0.5),
            k_n: 8,
            rho_max: T::lit(1.0),
            gamma: default_gamma(env),
            steer_step: T::lit(0.25),
            goal_tolerance: T::lit(DEFAULT_GOAL_TOLERANCE),
            goal_bias: T::lit(DEFAULT_GOAL_BIAS),
            risk: RiskParams {
                alpha: T::lit(0.1),
                n_c: DEFAULT_N_C,
                rng_seed: 0,
            },
            sigma_schedule: SigmaSchedule::Constant(T::lit(0.1)),
            baseline_parent: ParentRule::Nearest,
            continue_after_goal: false,
            sample_window: None,
            approx_vertices: DEFAULT_APPROX_VERTICES,
            grid: None,
            record_tree: false,
            record_time: false,
        }
    }

    /// Defaults for a lattice-constrained query: one move per edge, and
    /// neighbor and rewire balls just wide enough for the diagonal moves.
    pub fn gridded(env: &Environment<T>, model: GridMotionModel<T>) -> Self {
        let reach = model.threshold() * T::lit(1.01);
        PlannerParams {
            n_max: DEFAULT_N_MAX,
            neighborhood_radius: reach,
            steer_step: model.threshold(),
            rho_max: reach,
            grid: Some(model),
            ..Self::continuous(env)
        }
    }

    pub fn for_scenario(s: &BenchmarkScenario<T>) -> Self {
        match s.motion_model() {
            Some(m) => Self::gridded(&s.env, m),
            None => Self::continuous(&s.env),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let pos = |v: T| v.is_finite() && v > T::zero();
        if self.n_max < 1 {
            return Err("n_max must be >= 1".into());
        }
        if self.k_n < 1 {
            return Err("k_n must be >= 1".into());
        }
        for (name, v) in [
            ("neighborhood_radius", self.neighborhood_radius),
            ("rho_max", self.rho_max),
            ("steer_step", self.steer_step),
            ("goal_tolerance", self.goal_tolerance),
        ] {
            if !pos(v) {
                return Err(format!("{name} must be > 0, got {v}"));
            }
        }
        if !(self.gamma.is_finite() && self.gamma >= T::zero()) {
            return Err(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if !(self.goal_bias >= T::zero() && self.goal_bias < T::one()) {
            return Err(format!(
                "goal_bias must lie in [0, 1), got {}",
                self.goal_bias
            ));
        }
        if let Some(w) = self.sample_window {
            if !pos(w) {
                return Err(format!("sample_window must be > 0, got {w}"));
            }
        }
        if self.approx_vertices < 3 {
            return Err(format!(
                "approx_vertices must be >= 3, got {}",
                self.approx_vertices
            ));
        }
        if let Some(g) = &self.grid {
            g.validate().map_err(|e| e.to_string())?;
        }
        self.risk.validate().map_err(|e| e.to_string())?;
        self.sigma_schedule.validate()
    }
}
