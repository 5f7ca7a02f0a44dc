//! RRT* and risk-aware RRT* tree growth.
//!
//! Both planners share the sampler, steering, collision checking and rewiring
//! code. They differ in how a new node's parent is chosen and in the edge
//! cost: the baseline uses Euclidean length, the risk-aware planner ranks
//! neighbors by the empirical CVaR of the connecting segment's random length
//! and stores that CVaR as the edge cost.
//!
//! Every random decision uses a named stream keyed by the run seed and the
//! iteration, so the two planners see identical samples under equal seeds.

mod index;
mod ops;
mod outcome;
mod params;
mod tree;

pub use index::SpatialIndex;
pub use ops::{
    get_neighbors, nearest, rank_by_cvar, rewire, rewire_radius, sample_free, select_min_cvar,
    steer, CvarChoice, EdgeCost, EmpiricalCvar, Euclidean, RewireStats, SamplingExhausted,
    SAMPLE_REJECTION_CAP,
};
pub use outcome::{Counters, FailureReason, Path, PathSegment, PlanOutcome, Status, TreeSnapshot};
pub use params::{
    default_gamma, Algorithm, ParentRule, PlannerParams, SigmaSchedule, DEFAULT_GOAL_BIAS,
    DEFAULT_GOAL_TOLERANCE, DEFAULT_N_C, DEFAULT_N_MAX,
};
pub use tree::{Node, Tree};

use std::cmp::Ordering;
use std::time::Instant;

use thiserror::Error;

use crate::geometry::{
    point_in_free_space, CollisionChecker, Config, Environment, GeometryError, Rect, Segment,
};
use crate::risk::{cvar_alpha, var_alpha, worst_case_path_length, RiskError, SegmentCost};
use crate::rng::{stream, tag};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("invalid planner parameters: {0}")]
    Params(String),
    #[error("{0} is not in free space")]
    NotFree(&'static str),
    #[error("{0} is not on the grid")]
    OffGrid(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Risk(#[from] RiskError),
}

/// An environment prepared for repeated queries.
#[derive(Debug, Clone)]
pub struct Planner<T> {
    env: Environment<T>,
    checker: CollisionChecker<T>,
    params: PlannerParams<T>,
}

/// One-shot convenience wrapper around [`Planner`].
pub fn plan<T: Real>(
    env: &Environment<T>,
    start: Config<T>,
    goal: Config<T>,
    params: &PlannerParams<T>,
    algorithm: Algorithm,
    seed: u64,
) -> Result<PlanOutcome<T>, PlanError> {
    Planner::new(env.clone(), params.clone())?.plan(start, goal, algorithm, seed)
}

impl<T: Real> Planner<T> {
    pub fn new(env: Environment<T>, params: PlannerParams<T>) -> Result<Self, PlanError> {
        params.validate().map_err(PlanError::Params)?;
        env.validate()?;
        let checker = CollisionChecker::new(&env, params.approx_vertices)?;
        Ok(Planner {
            env,
            checker,
            params,
        })
    }

    pub fn params(&self) -> &PlannerParams<T> {
        &self.params
    }

    pub fn env(&self) -> &Environment<T> {
        &self.env
    }

    pub fn checker(&self) -> &CollisionChecker<T> {
        &self.checker
    }

    pub fn plan(
        &self,
        start: Config<T>,
        goal: Config<T>,
        algorithm: Algorithm,
        seed: u64,
    ) -> Result<PlanOutcome<T>, PlanError> {
        for (name, q) in [("start", start), ("goal", goal)] {
            if !point_in_free_space(q, &self.env) || !self.checker.point_free(q) {
                return Err(PlanError::NotFree(name));
            }
            if self.params.grid.is_some_and(|g| !g.on_grid(q)) {
                return Err(PlanError::OffGrid(name));
            }
        }
        let clock = self.params.record_time.then(Instant::now);
        let mut run = Run::new(self, start, goal, algorithm, seed);
        let status = run.grow();
        let wall_time_s = clock.map(|c| c.elapsed().as_secs_f64());
        run.finish(status, wall_time_s)
    }
}

/// Mutable state of one planning run.
struct Run<'a, T> {
    planner: &'a Planner<T>,
    params: &'a PlannerParams<T>,
    algorithm: Algorithm,
    seed: u64,
    start: Config<T>,
    goal: Config<T>,
    tree: Tree<T>,
    counters: Counters,
    goal_nodes: Vec<usize>,
    best_goal: Option<(T, usize)>,
    history: Vec<(usize, T)>,
    last_added: usize,
    peak_bytes: usize,
}

enum Grown {
    GoalReached,
    Exhausted,
    Capped,
}

impl<'a, T: Real> Run<'a, T> {
    fn new(
        planner: &'a Planner<T>,
        start: Config<T>,
        goal: Config<T>,
        algorithm: Algorithm,
        seed: u64,
    ) -> Self {
        let params = &planner.params;
        let cell_hint = params.neighborhood_radius.max(params.steer_step);
        let tree = Tree::new(start, planner.env.bounds, cell_hint);
        let peak_bytes = tree.heap_bytes();
        Run {
            planner,
            params,
            algorithm,
            seed,
            start,
            goal,
            tree,
            counters: Counters::default(),
            goal_nodes: Vec::new(),
            best_goal: None,
            history: Vec::new(),
            last_added: 0,
            peak_bytes,
        }
    }

    fn risk_tags(&self, purpose: u64, k: usize) -> [u64; 3] {
        [self.params.risk.rng_seed, purpose, k as u64]
    }

    fn sample_window(&self) -> Option<Rect<T>> {
        let w = self.params.sample_window?;
        let c = self.tree.node(self.last_added).config;
        Some(Rect::new(c, c).inflate(w))
    }

    fn grow(&mut self) -> Grown {
        if self.start.dist(self.goal) <= self.params.goal_tolerance {
            self.note_goal(0, 0);
            if !self.params.continue_after_goal {
                return Grown::GoalReached;
            }
        }
        for k in 0..self.params.n_max {
            self.counters.iterations = k + 1;
            let mut rng = stream(self.seed, &[tag::SAMPLE, k as u64]);
            let x_rand = if T::unit(&mut rng) < self.params.goal_bias {
                self.counters.samples_drawn += 1;
                self.goal
            } else {
                match sample_free(&self.planner.env, self.sample_window(), &mut rng) {
                    Ok((q, draws)) => {
                        self.counters.samples_drawn += draws;
                        q
                    }
                    Err(SamplingExhausted) => {
                        self.counters.samples_drawn += SAMPLE_REJECTION_CAP;
                        return Grown::Exhausted;
                    }
                }
            };
            if let Some(id) = self.extend(k, x_rand) {
                self.last_added = id;
                if self.tree.node(id).config.dist(self.goal) <= self.params.goal_tolerance {
                    self.goal_nodes.push(id);
                }
                self.refresh_best_goal(k + 1);
                if self.best_goal.is_some() && !self.params.continue_after_goal {
                    return Grown::GoalReached;
                }
            }
        }
        if self.best_goal.is_some() {
            Grown::GoalReached
        } else {
            Grown::Capped
        }
    }

    fn note_goal(&mut self, id: usize, k: usize) {
        self.goal_nodes.push(id);
        self.refresh_best_goal(k);
    }

    fn refresh_best_goal(&mut self, k: usize) {
        let best = self
            .goal_nodes
            .iter()
            .map(|&id| (self.tree.node(id).cost_to_root, id))
            .min_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap_or(Ordering::Equal)
                    .then(a.1.cmp(&b.1))
            });
        if let Some(b) = best {
            if self.best_goal.is_none_or(|old| b.0 < old.0) {
                self.history.push((k, b.0));
            }
            self.best_goal = Some(b);
        }
    }

    fn steer(&self, from: Config<T>, toward: Config<T>) -> Config<T> {
        match &self.params.grid {
            Some(g) => g.steer(from, toward),
            None => steer(from, toward, self.params.steer_step),
        }
    }

    fn edge_free(&mut self, a: Config<T>, b: Config<T>) -> bool {
        self.counters.collision_tests += 1;
        self.planner.checker.segment_free(&Segment::new(a, b))
    }

    /// One iteration after sampling: returns the id of the inserted node.
    fn extend(&mut self, k: usize, x_rand: Config<T>) -> Option<usize> {
        let params = self.params;
        let nearest_id = self.tree.nearest(x_rand);
        let x_nearest = self.tree.node(nearest_id).config;
        let x_new = self.steer(x_nearest, x_rand);
        let eps = T::geom_eps();
        let closest = self.tree.nearest(x_new);
        if self.tree.node(closest).config.dist(x_new) <= eps {
            self.counters.duplicates_skipped += 1;
            return None;
        }
        if !self.planner.checker.point_free(x_new) || !self.edge_free(x_nearest, x_new) {
            return None;
        }

        let mut candidates =
            get_neighbors(&self.tree, x_new, params.neighborhood_radius, params.k_n);
        if let Some(g) = &params.grid {
            candidates.retain(|&id| g.is_admissible_step(self.tree.node(id).config, x_new));
        }
        if candidates.is_empty() {
            candidates.push(nearest_id);
        }

        let sigma = params.sigma_schedule.at(k);
        let mut select_rng = stream(self.seed, &self.risk_tags(tag::SELECT, k));
        // (parent, edge cost), best first.
        let ranking: Vec<(usize, T)> = match self.algorithm {
            Algorithm::RaRrtStar => {
                let ranked = rank_by_cvar(
                    &self.tree,
                    &candidates,
                    x_new,
                    sigma,
                    &params.risk,
                    &mut select_rng,
                );
                self.counters.cvar_evaluations += ranked.len();
                let n_ra = ranked
                    .iter()
                    .map(|c| c.n_cvar.max(c.samples_used))
                    .max()
                    .unwrap_or(0);
                self.counters.n_ra_max = self.counters.n_ra_max.max(n_ra);
                self.counters.n_ra_total += n_ra;
                ranked.into_iter().map(|c| (c.id, c.cvar)).collect()
            }
            Algorithm::RrtStar => self.rank_baseline(&candidates, nearest_id, x_new),
        };

        // A colliding (x_min, x_new) edge is skipped and the next-ranked
        // candidate tried; x_min itself stays usable for later nodes.
        let mut chosen = None;
        for (i, &(id, cost)) in ranking.iter().enumerate() {
            if id == nearest_id || self.edge_free(self.tree.node(id).config, x_new) {
                chosen = Some((id, cost));
                break;
            }
            self.counters.blacklisted_edges += 1;
            if i == 0 {
                self.counters.literal_rule_divergences += 1;
            }
        }
        let (parent, edge_cost) = match chosen {
            Some(p) => p,
            None => {
                // Every ranked candidate collided; the nearest node is known free.
                let c = x_nearest.dist(x_new);
                let cost = match self.algorithm {
                    Algorithm::RaRrtStar => {
                        self.counters.cvar_evaluations += 1;
                        ops::score_segment(nearest_id, c, sigma, &params.risk, &mut select_rng).cvar
                    }
                    Algorithm::RrtStar => c,
                };
                (nearest_id, cost)
            }
        };

        let new_id = self.tree.insert(x_new, parent, edge_cost, sigma);
        let radius = rewire_radius(self.tree.len(), params.gamma, params.rho_max);
        let stats = match self.algorithm {
            Algorithm::RaRrtStar => {
                let mut rng = stream(self.seed, &self.risk_tags(tag::REWIRE, k));
                let mut model = EmpiricalCvar {
                    sigma,
                    risk: params.risk,
                    rng: &mut rng,
                    evaluations: 0,
                };
                let s = rewire(
                    &mut self.tree,
                    new_id,
                    radius,
                    &mut model,
                    &self.planner.checker,
                    params.grid.as_ref(),
                );
                self.counters.cvar_evaluations += model.evaluations;
                s
            }
            Algorithm::RrtStar => {
                let mut model = Euclidean(sigma);
                rewire(
                    &mut self.tree,
                    new_id,
                    radius,
                    &mut model,
                    &self.planner.checker,
                    params.grid.as_ref(),
                )
            }
        };
        self.counters.rewires += stats.rewired;
        self.counters.collision_tests += stats.collision_tests;
        self.peak_bytes = self.peak_bytes.max(self.tree.heap_bytes());
        Some(new_id)
    }

    fn rank_baseline(
        &self,
        candidates: &[usize],
        nearest_id: usize,
        x_new: Config<T>,
    ) -> Vec<(usize, T)> {
        let seg = |id: usize| self.tree.node(id).config.dist(x_new);
        match self.params.baseline_parent {
            ParentRule::Nearest => vec![(nearest_id, seg(nearest_id))],
            ParentRule::MinSegment | ParentRule::MinCostToCome => {
                let by_cost = self.params.baseline_parent == ParentRule::MinCostToCome;
                // (id, segment length, ranking key)
                let mut v: Vec<(usize, T, T)> = candidates
                    .iter()
                    .map(|&id| {
                        let c = seg(id);
                        let key = if by_cost {
                            self.tree.node(id).cost_to_root + c
                        } else {
                            c
                        };
                        (id, c, key)
                    })
                    .collect();
                v.sort_by(|a, b| {
                    a.2.partial_cmp(&b.2)
                        .unwrap_or(Ordering::Equal)
                        .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
                        .then(a.0.cmp(&b.0))
                });
                v.into_iter().map(|(id, c, _)| (id, c)).collect()
            }
        }
    }

    fn finish(self, grown: Grown, wall_time_s: Option<f64>) -> Result<PlanOutcome<T>, PlanError> {
        let status = match grown {
            Grown::GoalReached => {
                let (_, id) = self.best_goal.expect("goal reached");
                Status::Success {
                    path: self.extract_path(id)?,
                }
            }
            Grown::Exhausted => Status::Failure {
                reason: FailureReason::Exhausted,
            },
            Grown::Capped => Status::Failure {
                reason: FailureReason::IterationCap,
            },
        };
        let tree = self.params.record_tree.then(|| TreeSnapshot {
            configs: self.tree.nodes().iter().map(|n| n.config).collect(),
            parents: self.tree.nodes().iter().map(|n| n.parent).collect(),
            cost_to_root: self.tree.nodes().iter().map(|n| n.cost_to_root).collect(),
            edge_costs: self.tree.nodes().iter().map(|n| n.edge_cost).collect(),
        });
        Ok(PlanOutcome {
            algorithm: self.algorithm,
            seed: self.seed,
            alpha: self.params.risk.alpha,
            status,
            iterations: self.counters.iterations,
            node_count: self.tree.len(),
            counters: self.counters,
            wall_time_s,
            goal_cost_history: self.history,
            tree,
            memory_bytes: self.peak_bytes,
        })
    }

    fn extract_path(&self, goal_id: usize) -> Result<Path<T>, PlanError> {
        let ids = self.tree.path_to(goal_id);
        let alpha = self.params.risk.alpha;
        let waypoints: Vec<Config<T>> = ids.iter().map(|&i| self.tree.node(i).config).collect();
        let mut segments = Vec::with_capacity(ids.len().saturating_sub(1));
        for pair in ids.windows(2) {
            let c = self
                .tree
                .node(pair[0])
                .config
                .dist(self.tree.node(pair[1]).config);
            let cost = SegmentCost::new(c, self.tree.node(pair[1]).edge_sigma)?;
            segments.push(PathSegment {
                c,
                sigma: cost.sigma,
                var: var_alpha(&cost, alpha)?,
                cvar: cvar_alpha(&cost, alpha)?,
            });
        }
        let costs: Vec<SegmentCost<T>> = segments.iter().map(PathSegment::cost).collect();
        Ok(Path {
            total_euclidean: segments.iter().fold(T::zero(), |a, s| a + s.c),
            total_var: segments.iter().fold(T::zero(), |a, s| a + s.var),
            total_cvar: worst_case_path_length(&costs, alpha)?,
            waypoints,
            segments,
        })
    }
}
