//! Risk-aware sampling-based path planning.
//!
//! Segment lengths of a planned path are random: the Euclidean length plus
//! zero-mean Gaussian noise. [`planner`] grows an RRT* tree either with the
//! classic Euclidean cost or by choosing each new node's parent to minimize
//! the empirical CVaR of the connecting segment. [`risk`] holds the VaR/CVaR
//! and exceedance-bound math, [`geometry`] the obstacle models and collision
//! tests, [`gridworld`] the lattice motion model and benchmark scenario, and
//! [`experiments`] the seeded batch runner that aggregates both planners.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.
//!
//! ```
//! use riskplan::{build_benchmark_scenario, plan, Algorithm, PlannerParams, Scenario};
//!
//! let s: Scenario = build_benchmark_scenario(None).unwrap();
//! let mut params = PlannerParams::for_scenario(&s);
//! params.n_max = 200;
//! let out = plan(&s.env, s.start, s.goal, &params, Algorithm::RaRrtStar, 7).unwrap();
//! assert!(out.iterations <= 200);
//! ```

pub mod experiments;
pub mod geometry;
pub mod gridworld;
pub mod planner;
pub mod risk;
pub mod rng;
pub mod scalar;

pub use experiments::{
    run_cell, sweep, trend_report, BatchStats, RunRecord, SweepConfig, TrendReport,
};
pub use geometry::{point_in_free_space, segment_collision_free, CollisionChecker, GeometryError};
pub use gridworld::{build_benchmark_scenario, GridError};
pub use planner::{plan, Algorithm, ParentRule, PlanError, Planner, SigmaSchedule};
pub use risk::{
    cvar_alpha, cvar_empirical, expectation_bound, kl_gaussian, markov_upper_bound, sample_costs,
    var_alpha, var_empirical, varsigma, worst_case_path_length, RiskError,
};
pub use scalar::Real;

pub type Config = geometry::Config<f64>;
pub type Segment = geometry::Segment<f64>;
pub type Rect = geometry::Rect<f64>;
pub type Circle = geometry::Circle<f64>;
pub type ConvexPolygon = geometry::ConvexPolygon<f64>;
pub type Obstacle = geometry::Obstacle<f64>;
pub type Environment = geometry::Environment<f64>;
pub type SegmentCost = risk::SegmentCost<f64>;
pub type RiskParams = risk::RiskParams<f64>;
pub type GuaranteeInputs = risk::GuaranteeInputs<f64>;
pub type MarkovBound = risk::MarkovBound<f64>;
pub type GridMotionModel = gridworld::GridMotionModel<f64>;
pub type Scenario = gridworld::BenchmarkScenario<f64>;
pub type PlannerParams = planner::PlannerParams<f64>;
pub type PlanOutcome = planner::PlanOutcome<f64>;
pub type Path = planner::Path<f64>;
pub type Tree = planner::Tree<f64>;
