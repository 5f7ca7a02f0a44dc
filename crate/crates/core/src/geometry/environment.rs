use serde::{Deserialize, Serialize};

use super::{point_in_free_space, Config, GeometryError, Obstacle, Rect};
use crate::scalar::Real;

/// Workspace, obstacles and robot footprint.
///
/// JSON form:
/// `{"bounds":[xmin,ymin,xmax,ymax],"robot_radius":R,"resolution":[dx,dy],"obstacles":[...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Environment<T> {
    pub bounds: Rect<T>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle<T>>,
    #[serde(default)]
    pub robot_radius: T,
    #[serde(rename = "resolution")]
    pub grid_resolution: (T, T),
}

const FREE_PROBE: usize = 128;

impl<T: Real> Environment<T> {
    pub fn new(
        bounds: Rect<T>,
        obstacles: Vec<Obstacle<T>>,
        robot_radius: T,
        resolution: (T, T),
    ) -> Self {
        Environment {
            bounds,
            obstacles,
            robot_radius,
            grid_resolution: resolution,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !self.bounds.is_valid() {
            return Err(GeometryError::invalid(
                "bounds",
                "must be finite with positive area",
            ));
        }
        if !(self.robot_radius.is_finite() && self.robot_radius >= T::zero()) {
            return Err(GeometryError::invalid("robot_radius", "must be >= 0"));
        }
        let (dx, dy) = self.grid_resolution;
        if !(dx.is_finite() && dx > T::zero()) {
            return Err(GeometryError::invalid("resolution[0]", "must be > 0"));
        }
        if !(dy.is_finite() && dy > T::zero()) {
            return Err(GeometryError::invalid("resolution[1]", "must be > 0"));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            o.validate(&format!("obstacles[{i}]"))?;
        }
        if self.free_fraction() <= 0.0 {
            return Err(GeometryError::invalid(
                "obstacles",
                "leave no free space inside bounds",
            ));
        }
        Ok(())
    }

    /// Fraction of a regular probe lattice over the bounds that is free.
    pub fn free_fraction(&self) -> f64 {
        let n = FREE_PROBE;
        let mut free = 0usize;
        for i in 0..n {
            for j in 0..n {
                let u = T::lit((i as f64 + 0.5) / n as f64);
                let v = T::lit((j as f64 + 0.5) / n as f64);
                let p = Config::new(
                    self.bounds.min.x + u * self.bounds.width(),
                    self.bounds.min.y + v * self.bounds.height(),
                );
                if point_in_free_space(p, self) {
                    free += 1;
                }
            }
        }
        free as f64 / (n * n) as f64
    }

    pub fn free_area(&self) -> T {
        T::lit(self.free_fraction()) * self.bounds.area()
    }

    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let env: Environment<T> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        env.validate().map_err(|e| e.to_string())?;
        Ok(env)
    }
}
