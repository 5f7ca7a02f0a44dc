//! Planar primitives, obstacle models and collision predicates.

mod collision;
mod environment;
mod obstacle;

pub use collision::{point_in_free_space, segment_collision_free, CollisionChecker, Shape};
pub use environment::Environment;
pub use obstacle::{dilate, polyhedral_approximation, Circle, ConvexPolygon, Obstacle};

use std::ops::{Add, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Real;

/// Number of polygon vertices used when approximating non-convex obstacles.
pub const DEFAULT_APPROX_VERTICES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("polyhedral approximation needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
}

impl GeometryError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        GeometryError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// A point of the planar configuration space, in meters.
///
/// Serialized as a two-element array `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Config<T> {
    pub x: T,
    pub y: T,
}

impl<T> From<[T; 2]> for Config<T> {
    fn from([x, y]: [T; 2]) -> Self {
        Config { x, y }
    }
}

impl<T> From<Config<T>> for [T; 2] {
    fn from(c: Config<T>) -> Self {
        [c.x, c.y]
    }
}

impl<T: Serialize> Serialize for Config<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.x, &self.y).serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Config<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        <[T; 2]>::deserialize(d).map(Config::from)
    }
}

impl<T: Real> Add for Config<T> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Config::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Config<T> {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Config::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Config<T> {
    pub fn new(x: T, y: T) -> Self {
        Config { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scale(self, s: T) -> Self {
        Config::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn dist_sq(self, o: Self) -> T {
        let d = self - o;
        d.dot(d)
    }

    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self).scale(t)
    }
}

/// Directed straight edge between two configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub a: Config<T>,
    pub b: Config<T>,
}

impl<T: Real> Segment<T> {
    pub fn new(a: Config<T>, b: Config<T>) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> T {
        self.a.dist(self.b)
    }

    pub fn reversed(&self) -> Self {
        Segment::new(self.b, self.a)
    }

    pub fn midpoint(&self) -> Config<T> {
        self.a.lerp(self.b, T::lit(0.5))
    }

    /// Squared distance from `p` to the closest point of the segment.
    pub fn dist_sq_to(&self, p: Config<T>) -> T {
        let d = self.b - self.a;
        let len_sq = d.dot(d);
        let t = if len_sq > T::zero() {
            ((p - self.a).dot(d) / len_sq).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        (self.a + d.scale(t)).dist_sq(p)
    }
}

/// Axis-aligned rectangle, serialized as `[xmin, ymin, xmax, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub min: Config<T>,
    pub max: Config<T>,
}

impl<T> From<[T; 4]> for Rect<T> {
    fn from([x0, y0, x1, y1]: [T; 4]) -> Self {
        Rect {
            min: Config { x: x0, y: y0 },
            max: Config { x: x1, y: y1 },
        }
    }
}

impl<T> From<Rect<T>> for [T; 4] {
    fn from(r: Rect<T>) -> Self {
        [r.min.x, r.min.y, r.max.x, r.max.y]
    }
}

impl<T: Serialize> Serialize for Rect<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.min.x, &self.min.y, &self.max.x, &self.max.y).serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Rect<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        <[T; 4]>::deserialize(d).map(Rect::from)
    }
}

impl<T: Real> Rect<T> {
    pub fn new(min: Config<T>, max: Config<T>) -> Self {
        Rect { min, max }
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    pub fn center(&self) -> Config<T> {
        self.min.lerp(self.max, T::lit(0.5))
    }

    /// Closed containment with the geometric tolerance.
    pub fn contains(&self, p: Config<T>) -> bool {
        let e = T::geom_eps();
        p.x >= self.min.x - e
            && p.x <= self.max.x + e
            && p.y >= self.min.y - e
            && p.y <= self.max.y + e
    }

    pub fn overlaps(&self, o: &Rect<T>) -> bool {
        self.min.x <= o.max.x
            && o.min.x <= self.max.x
            && self.min.y <= o.max.y
            && o.min.y <= self.max.y
    }

    pub fn intersect(&self, o: &Rect<T>) -> Rect<T> {
        Rect::new(
            Config::new(self.min.x.max(o.min.x), self.min.y.max(o.min.y)),
            Config::new(self.max.x.min(o.max.x), self.max.y.min(o.max.y)),
        )
    }

    pub fn inflate(&self, r: T) -> Rect<T> {
        Rect::new(
            Config::new(self.min.x - r, self.min.y - r),
            Config::new(self.max.x + r, self.max.y + r),
        )
    }

    pub fn around(points: impl IntoIterator<Item = Config<T>>) -> Rect<T> {
        let inf = T::infinity();
        let mut r = Rect::new(Config::new(inf, inf), Config::new(-inf, -inf));
        for p in points {
            r.min.x = r.min.x.min(p.x);
            r.min.y = r.min.y.min(p.y);
            r.max.x = r.max.x.max(p.x);
            r.max.y = r.max.y.max(p.y);
        }
        r
    }

    pub fn is_valid(&self) -> bool {
        self.min.is_finite()
            && self.max.is_finite()
            && self.width() > T::zero()
            && self.height() > T::zero()
    }
}
