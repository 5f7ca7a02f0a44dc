//! Grid-constrained motion and the benchmark scenario.
//!
//! Configurations live on a lattice anchored at the origin with spacing
//! `(d_x, d_y)`. A move is one of the eight unit lattice steps whose length
//! stays under `rho_scale * sqrt(d_x^2 + d_y^2)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    segment_collision_free, Circle, Config, Environment, Obstacle, Rect, Segment,
};
use crate::planner::steer;
use crate::rng::{stream, tag};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid resolution must be positive, got ({0}, {1})")]
    BadResolution(f64, f64),
    #[error("rho_scale must be positive, got {0}")]
    BadScale(f64),
    #[error("configuration ({0}, {1}) is not on the grid")]
    OffGrid(f64, f64),
    #[error("scenario: {0}")]
    Scenario(String),
}

/// Single-integrator lattice motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMotionModel<T> {
    pub d_x: T,
    pub d_y: T,
    pub rho_scale: T,
}

impl<T: Real> GridMotionModel<T> {
    pub fn new(d_x: T, d_y: T, rho_scale: T) -> Result<Self, GridError> {
        let m = GridMotionModel {
            d_x,
            d_y,
            rho_scale,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let pos = |v: T| v.is_finite() && v > T::zero();
        if !pos(self.d_x) || !pos(self.d_y) {
            return Err(GridError::BadResolution(
                self.d_x.as_f64(),
                self.d_y.as_f64(),
            ));
        }
        if !pos(self.rho_scale) {
            return Err(GridError::BadScale(self.rho_scale.as_f64()));
        }
        Ok(())
    }

    /// Longest admissible move.
    pub fn threshold(&self) -> T {
        self.rho_scale * self.d_x.hypot(self.d_y)
    }

    /// Unit lattice steps under the length threshold, in a fixed order:
    /// the four axis moves, then the four diagonals.
    pub fn moves(&self) -> Vec<Config<T>> {
        let (dx, dy) = (self.d_x, self.d_y);
        let z = T::zero();
        let all = [
            Config::new(dx, z),
            Config::new(-dx, z),
            Config::new(z, dy),
            Config::new(z, -dy),
            Config::new(dx, dy),
            Config::new(-dx, dy),
            Config::new(dx, -dy),
            Config::new(-dx, -dy),
        ];
        let limit = self.threshold() + T::geom_eps();
        all.into_iter().filter(|u| u.norm() <= limit).collect()
    }

    fn axis_on_grid(v: T, d: T) -> bool {
        (v - (v / d).round() * d).abs() <= T::geom_eps()
    }

    pub fn on_grid(&self, q: Config<T>) -> bool {
        q.is_finite() && Self::axis_on_grid(q.x, self.d_x) && Self::axis_on_grid(q.y, self.d_y)
    }

    fn snap_axis(v: T, d: T) -> T {
        // Rounds half-way points down.
        (v / d - T::lit(0.5)).ceil() * d
    }

    /// Nearest lattice point, ties toward lower coordinates.
    pub fn snap_to_grid(&self, q: Config<T>) -> Config<T> {
        Config::new(
            Self::snap_axis(q.x, self.d_x),
            Self::snap_axis(q.y, self.d_y),
        )
    }

    /// Moves from `q` that stay inside `bounds`.
    pub fn admissible_moves(
        &self,
        q: Config<T>,
        bounds: &Rect<T>,
    ) -> Result<Vec<Config<T>>, GridError> {
        if !self.on_grid(q) {
            return Err(GridError::OffGrid(q.x.as_f64(), q.y.as_f64()));
        }
        Ok(self
            .moves()
            .into_iter()
            .map(|u| self.snap_to_grid(q + u))
            .filter(|p| bounds.contains(*p))
            .collect())
    }

    /// Whether `b - a` is one admissible lattice step.
    pub fn is_admissible_step(&self, a: Config<T>, b: Config<T>) -> bool {
        let tol = T::lit(1e-6);
        let unit = |delta: T, d: T| {
            let r = (delta / d).abs();
            if r <= tol {
                Some(0u8)
            } else if (r - T::one()).abs() <= tol {
                Some(1)
            } else {
                None
            }
        };
        let d = b - a;
        match (unit(d.x, self.d_x), unit(d.y, self.d_y)) {
            (Some(i), Some(j)) if i + j > 0 => d.norm() <= self.threshold() + T::geom_eps(),
            _ => false,
        }
    }

    /// Steers one threshold length toward `toward` and snaps the result. If
    /// the snapped step is not admissible (e.g. a diagonal excluded by
    /// `rho_scale`), the admissible move best aligned with the request is
    /// taken instead. Returns `from` when no progress is possible.
    pub fn steer(&self, from: Config<T>, toward: Config<T>) -> Config<T> {
        let snapped = self.snap_to_grid(steer(from, toward, self.threshold()));
        if snapped == from || self.is_admissible_step(from, snapped) {
            return snapped;
        }
        let dir = toward - from;
        let mut best: Option<(T, Config<T>)> = None;
        for u in self.moves() {
            let score = u.dot(dir) / u.norm();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, u));
            }
        }
        match best {
            Some((s, u)) if s > T::zero() => self.snap_to_grid(from + u),
            _ => from,
        }
    }
}

/// Grid settings stored alongside a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GridSpec<T> {
    #[serde(default = "one")]
    pub rho_scale: T,
    /// Snap steer outputs to the lattice. `false` plans in the continuum.
    #[serde(default = "yes")]
    pub snap: bool,
}

fn one<T: Real>() -> T {
    T::one()
}

fn yes() -> bool {
    true
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        GridSpec {
            rho_scale: T::one(),
            snap: true,
        }
    }
}

/// An environment plus a start/goal query.
///
/// JSON form is the environment document with `start`, `goal`, and optional
/// `grid` and `description` keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BenchmarkScenario<T> {
    #[serde(flatten)]
    pub env: Environment<T>,
    pub start: Config<T>,
    pub goal: Config<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec<T>>,
    #[serde(default)]
    pub description: String,
}

impl<T: Real> BenchmarkScenario<T> {
    /// Motion model when the scenario is grid-constrained.
    pub fn motion_model(&self) -> Option<GridMotionModel<T>> {
        let g = self.grid.filter(|g| g.snap)?;
        Some(GridMotionModel {
            d_x: self.env.grid_resolution.0,
            d_y: self.env.grid_resolution.1,
            rho_scale: g.rho_scale,
        })
    }

    pub fn validate(&self) -> Result<(), GridError> {
        self.env
            .validate()
            .map_err(|e| GridError::Scenario(e.to_string()))?;
        for (name, q) in [("start", self.start), ("goal", self.goal)] {
            if !crate::geometry::point_in_free_space(q, &self.env) {
                return Err(GridError::Scenario(format!("{name} is not in free space")));
            }
        }
        if let Some(m) = self.motion_model() {
            m.validate()?;
            for (name, q) in [("start", self.start), ("goal", self.goal)] {
                if !m.on_grid(q) {
                    return Err(GridError::Scenario(format!("{name} is not on the grid")));
                }
            }
        }
        Ok(())
    }

    /// True when the straight start-goal segment is blocked.
    pub fn is_nontrivial(&self) -> bool {
        !segment_collision_free(&Segment::new(self.start, self.goal), &self.env)
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let s: BenchmarkScenario<T> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        s.validate().map_err(|e| e.to_string())?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

const RANDOM_ATTEMPTS: usize = 1000;

/// The default benchmark, or a randomized variant for `Some(seed)`.
///
/// Both have a 5 m square workspace, five circular obstacles and a composite
/// of three overlapping circles across the start-goal diagonal.
pub fn build_benchmark_scenario<T: Real>(
    seed: Option<u64>,
) -> Result<BenchmarkScenario<T>, GridError> {
    match seed {
        None => Ok(default_scenario()),
        Some(seed) => random_scenario(seed),
    }
}

fn c<T: Real>(x: f64, y: f64) -> Config<T> {
    Config::new(T::lit(x), T::lit(y))
}

fn circle<T: Real>(x: f64, y: f64, r: f64) -> Circle<T> {
    Circle::new(c(x, y), T::lit(r))
}

fn base_env<T: Real>(obstacles: Vec<Obstacle<T>>) -> Environment<T> {
    Environment::new(
        Rect::new(c(0.0, 0.0), c(5.0, 5.0)),
        obstacles,
        T::lit(0.1),
        (T::lit(0.05), T::lit(0.05)),
    )
}

fn default_scenario<T: Real>() -> BenchmarkScenario<T> {
    let mut obstacles: Vec<Obstacle<T>> = [
        (1.4, 1.5, 0.40),
        (3.5, 3.4, 0.45),
        (1.2, 3.1, 0.50),
        (3.3, 1.5, 0.40),
        (2.2, 4.0, 0.30),
    ]
    .iter()
    .map(|&(x, y, r)| Obstacle::Circle(circle(x, y, r)))
    .collect();
    obstacles.push(Obstacle::CompositeCircles {
        circles: vec![
            circle(2.3, 2.5, 0.35),
            circle(2.6, 2.4, 0.45),
            circle(2.85, 2.75, 0.30),
        ],
    });
    BenchmarkScenario {
        env: base_env(obstacles),
        start: c(0.5, 0.5),
        goal: c(4.5, 4.5),
        grid: Some(GridSpec::default()),
        description: "default benchmark: five circles and a three-circle composite on a 5 m square"
            .into(),
    }
}

fn random_scenario<T: Real>(seed: u64) -> Result<BenchmarkScenario<T>, GridError> {
    let mut rng = stream(seed, &[tag::SCENARIO]);
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
    for _ in 0..RANDOM_ATTEMPTS {
        let mut obstacles: Vec<Obstacle<T>> = (0..5)
            .map(|_| Obstacle::Circle(circle(u(0.8, 4.2), u(0.8, 4.2), u(0.3, 0.5))))
            .collect();
        let (cx, cy) = (u(2.2, 2.8), u(2.2, 2.8));
        let radii = [u(0.3, 0.45), u(0.35, 0.5), u(0.25, 0.4)];
        let a0 = u(0.0, std::f64::consts::TAU);
        let members = (0..3)
            .map(|i| {
                let a = a0 + i as f64 * std::f64::consts::TAU / 3.0;
                circle(cx + 0.2 * a.cos(), cy + 0.2 * a.sin(), radii[i])
            })
            .collect();
        obstacles.push(Obstacle::CompositeCircles { circles: members });
        let s = BenchmarkScenario {
            env: base_env(obstacles),
            start: c(0.5, 0.5),
            goal: c(4.5, 4.5),
            grid: Some(GridSpec::default()),
            description: format!("randomized benchmark, seed {seed}"),
        };
        if s.validate().is_ok() && s.is_nontrivial() {
            return Ok(s);
        }
    }
    Err(GridError::Scenario(format!(
        "no valid randomized layout in {RANDOM_ATTEMPTS} attempts"
    )))
}
