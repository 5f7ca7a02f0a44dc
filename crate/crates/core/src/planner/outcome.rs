use serde::{Deserialize, Serialize};

use super::params::Algorithm;
use crate::geometry::Config;
use crate::risk::SegmentCost;

/// One edge of a returned path with its risk statistics at the planning alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSegment<T> {
    pub c: T,
    pub sigma: T,
    pub var: T,
    pub cvar: T,
}

impl<T: Copy> PathSegment<T> {
    pub fn cost(&self) -> SegmentCost<T> {
        SegmentCost {
            c: self.c,
            sigma: self.sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path<T> {
    pub waypoints: Vec<Config<T>>,
    pub segments: Vec<PathSegment<T>>,
    pub total_euclidean: T,
    pub total_var: T,
    /// Worst-case length: sum of segment CVaRs.
    pub total_cvar: T,
}

impl<T: Copy> Path<T> {
    pub fn segment_costs(&self) -> Vec<SegmentCost<T>> {
        self.segments.iter().map(PathSegment::cost).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    IterationCap,
    /// Rejection sampling found no free configuration.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status<T> {
    Success { path: Path<T> },
    Failure { reason: FailureReason },
}

/// Work counters of one planning run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counters {
    pub iterations: usize,
    pub samples_drawn: usize,
    pub collision_tests: usize,
    pub cvar_evaluations: usize,
    /// Largest per-iteration `max(n_cvar, n_c)`.
    pub n_ra_max: usize,
    /// Sum over iterations of the per-iteration `max(n_cvar, n_c)`.
    pub n_ra_total: usize,
    pub rewires: usize,
    pub blacklisted_edges: usize,
    /// Iterations where adding the colliding parent to the obstacle set and
    /// restarting would have behaved differently from the edge blacklist.
    pub literal_rule_divergences: usize,
    pub duplicates_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSnapshot<T> {
    pub configs: Vec<Config<T>>,
    pub parents: Vec<Option<usize>>,
    pub cost_to_root: Vec<T>,
    pub edge_costs: Vec<T>,
}

impl<T> TreeSnapshot<T> {
    /// Edges as `(parent, child)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .filter_map(|(child, p)| p.map(|p| (p, child)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOutcome<T> {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub alpha: T,
    #[serde(flatten)]
    pub status: Status<T>,
    pub iterations: usize,
    pub node_count: usize,
    pub counters: Counters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    /// `(iteration, cost)` each time the best goal-reaching cost improved.
    pub goal_cost_history: Vec<(usize, T)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeSnapshot<T>>,
    /// Peak heap bytes of the tree and index.
    pub memory_bytes: usize,
}

impl<T> PlanOutcome<T> {
    pub fn path(&self) -> Option<&Path<T>> {
        match &self.status {
            Status::Success { path } => Some(path),
            Status::Failure { .. } => None,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self.status, Status::Success { .. })
    }
}
