//! Building blocks of the tree-growth loop.

use std::cmp::Ordering;

use rand::Rng;

use super::tree::Tree;
use crate::geometry::{point_in_free_space, CollisionChecker, Config, Environment, Rect, Segment};
use crate::gridworld::GridMotionModel;
use crate::risk::{cvar_empirical, sample_costs, RiskParams, SegmentCost};
use crate::scalar::Real;

/// Rejections allowed before `sample_free` gives up.
pub const SAMPLE_REJECTION_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingExhausted;

/// Uniform draw over `hint` (default: the workspace) rejected until free.
/// Returns the sample and the number of draws it took.
pub fn sample_free<T: Real, R: Rng + ?Sized>(
    env: &Environment<T>,
    hint: Option<Rect<T>>,
    rng: &mut R,
) -> Result<(Config<T>, usize), SamplingExhausted> {
    let area = hint.map_or(env.bounds, |h| h.intersect(&env.bounds));
    for draws in 1..=SAMPLE_REJECTION_CAP {
        let q = Config::new(
            area.min.x + T::unit(rng) * area.width(),
            area.min.y + T::unit(rng) * area.height(),
        );
        if point_in_free_space(q, env) {
            return Ok((q, draws));
        }
    }
    Err(SamplingExhausted)
}

/// Nearest tree node, ties to the lowest id.
pub fn nearest<T: Real>(tree: &Tree<T>, q: Config<T>) -> usize {
    tree.nearest(q)
}

/// Moves at most `step` from `from` toward `toward`.
pub fn steer<T: Real>(from: Config<T>, toward: Config<T>, step: T) -> Config<T> {
    let d = toward.dist(from);
    if d <= step {
        toward
    } else {
        from.lerp(toward, step / d)
    }
}

/// Up to `k_n` nodes within `r_m` of `q`, sorted by distance then id.
pub fn get_neighbors<T: Real>(tree: &Tree<T>, q: Config<T>, r_m: T, k_n: usize) -> Vec<usize> {
    let mut near = tree.index().within(q, r_m);
    near.truncate(k_n);
    near.into_iter().map(|(id, _)| id).collect()
}

/// `min(gamma sqrt(ln n / n), rho_max)`; `rho_max` when `n < 2`.
pub fn rewire_radius<T: Real>(node_count: usize, gamma: T, rho_max: T) -> T {
    if node_count < 2 {
        return rho_max;
    }
    let n = T::lit(node_count as f64);
    (gamma * (n.ln() / n).sqrt()).min(rho_max)
}

/// A candidate parent scored by the empirical CVaR of its connecting segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvarChoice<T> {
    pub id: usize,
    pub c: T,
    pub cvar: T,
    pub var: T,
    pub n_cvar: usize,
    pub samples_used: usize,
}

/// Scores every candidate and sorts by (CVaR, c, id). Candidates are drawn
/// from `rng` in the order given.
pub fn rank_by_cvar<T: Real, R: Rng + ?Sized>(
    tree: &Tree<T>,
    candidates: &[usize],
    x_new: Config<T>,
    sigma: T,
    risk: &RiskParams<T>,
    rng: &mut R,
) -> Vec<CvarChoice<T>> {
    let mut scored: Vec<CvarChoice<T>> = candidates
        .iter()
        .map(|&id| score_segment(id, tree.node(id).config.dist(x_new), sigma, risk, rng))
        .collect();
    scored.sort_by(|a, b| {
        a.cvar
            .partial_cmp(&b.cvar)
            .unwrap_or(Ordering::Equal)
            .then(a.c.partial_cmp(&b.c).unwrap_or(Ordering::Equal))
            .then(a.id.cmp(&b.id))
    });
    scored
}

pub(crate) fn score_segment<T: Real, R: Rng + ?Sized>(
    id: usize,
    c: T,
    sigma: T,
    risk: &RiskParams<T>,
    rng: &mut R,
) -> CvarChoice<T> {
    let sample = sample_costs(&SegmentCost { c, sigma }, risk, rng);
    let tail = cvar_empirical(&sample, risk.alpha);
    CvarChoice {
        id,
        c,
        cvar: tail.cvar,
        var: tail.var,
        n_cvar: tail.n_cvar,
        samples_used: sample.len(),
    }
}

/// The candidate whose connecting segment has minimal empirical CVaR.
pub fn select_min_cvar<T: Real, R: Rng + ?Sized>(
    tree: &Tree<T>,
    candidates: &[usize],
    x_new: Config<T>,
    sigma: T,
    risk: &RiskParams<T>,
    rng: &mut R,
) -> Option<CvarChoice<T>> {
    rank_by_cvar(tree, candidates, x_new, sigma, risk, rng)
        .into_iter()
        .next()
}

/// Edge cost used when growing and rewiring the tree.
pub trait EdgeCost<T> {
    fn cost(&mut self, c: T) -> T;
    /// Noise level recorded on edges created under this model.
    fn sigma(&self) -> T;
}

/// Deterministic Euclidean length.
#[derive(Debug, Clone, Copy)]
pub struct Euclidean<T>(pub T);

impl<T: Real> EdgeCost<T> for Euclidean<T> {
    fn cost(&mut self, c: T) -> T {
        c
    }

    fn sigma(&self) -> T {
        self.0
    }
}

/// Empirical CVaR of `c + N(0, sigma^2)` from fresh draws.
pub struct EmpiricalCvar<'a, T, R: ?Sized> {
    pub sigma: T,
    pub risk: RiskParams<T>,
    pub rng: &'a mut R,
    pub evaluations: usize,
}

impl<T: Real, R: Rng + ?Sized> EdgeCost<T> for EmpiricalCvar<'_, T, R> {
    fn cost(&mut self, c: T) -> T {
        self.evaluations += 1;
        score_segment(0, c, self.sigma, &self.risk, self.rng).cvar
    }

    fn sigma(&self) -> T {
        self.sigma
    }
}

/// What `rewire` did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RewireStats {
    pub rewired: usize,
    pub collision_tests: usize,
}

/// Reparents nodes near `new_id` through it when that lowers their cost.
///
/// Neighbors are visited by distance then id. With a motion model, only
/// nodes one admissible move away are considered.
pub fn rewire<T: Real>(
    tree: &mut Tree<T>,
    new_id: usize,
    radius: T,
    cost_model: &mut dyn EdgeCost<T>,
    checker: &CollisionChecker<T>,
    grid: Option<&GridMotionModel<T>>,
) -> RewireStats {
    let mut stats = RewireStats::default();
    let x_new = tree.node(new_id).config;
    let parent = tree.node(new_id).parent;
    let near = tree.index().within(x_new, radius);
    for (id, d2) in near {
        if id == new_id || Some(id) == parent {
            continue;
        }
        let x_near = tree.node(id).config;
        if grid.is_some_and(|g| !g.is_admissible_step(x_new, x_near)) {
            continue;
        }
        let edge = cost_model.cost(d2.sqrt());
        let through = tree.node(new_id).cost_to_root + edge;
        let improves = through < tree.node(id).cost_to_root;
        if !improves || tree.is_ancestor(id, new_id) {
            continue;
        }
        stats.collision_tests += 1;
        if !checker.segment_free(&Segment::new(x_new, x_near)) {
            continue;
        }
        tree.reparent(id, new_id, edge, cost_model.sigma());
        stats.rewired += 1;
    }
    stats
}
