use serde::{Deserialize, Serialize};

use super::{Config, GeometryError, Rect, Segment};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle<T> {
    pub center: Config<T>,
    pub radius: T,
}

impl<T: Real> Circle<T> {
    pub fn new(center: Config<T>, radius: T) -> Self {
        Circle { center, radius }
    }

    pub fn contains(&self, p: Config<T>) -> bool {
        p.dist(self.center) <= self.radius
    }

    pub fn bounding_box(&self) -> Rect<T> {
        Rect::new(self.center, self.center).inflate(self.radius)
    }

    fn validate(&self, field: &str) -> Result<(), GeometryError> {
        if !self.center.is_finite() {
            return Err(GeometryError::invalid(
                format!("{field}.center"),
                "must be finite",
            ));
        }
        if !(self.radius.is_finite() && self.radius > T::zero()) {
            return Err(GeometryError::invalid(
                format!("{field}.radius"),
                "must be > 0",
            ));
        }
        Ok(())
    }
}

/// Convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon<T> {
    pub vertices: Vec<Config<T>>,
}

impl<T: Real> ConvexPolygon<T> {
    /// Validates counter-clockwise order and convexity.
    pub fn new(vertices: Vec<Config<T>>) -> Result<Self, GeometryError> {
        let p = ConvexPolygon { vertices };
        p.validate("polygon")?;
        Ok(p)
    }

    pub(crate) fn new_unchecked(vertices: Vec<Config<T>>) -> Self {
        ConvexPolygon { vertices }
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment<T>> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> T {
        let half = T::lit(0.5);
        self.edges().fold(T::zero(), |acc, e| acc + e.a.cross(e.b)) * half
    }

    /// Closed containment; points within `eps` of the boundary count as inside.
    pub fn contains_eps(&self, p: Config<T>, eps: T) -> bool {
        self.edges().all(|e| {
            let d = e.b - e.a;
            let len = d.norm();
            len <= T::zero() || d.cross(p - e.a) >= -eps * len
        })
    }

    pub fn contains(&self, p: Config<T>) -> bool {
        self.contains_eps(p, T::zero())
    }

    pub fn boundary_distance(&self, p: Config<T>) -> T {
        self.edges()
            .map(|e| e.dist_sq_to(p))
            .fold(T::infinity(), T::min)
            .sqrt()
    }

    pub fn bounding_box(&self) -> Rect<T> {
        Rect::around(self.vertices.iter().copied())
    }

    /// Offsets every edge outward by `r`; each corner moves along its angle
    /// bisector to distance `r / cos(theta / 2)`.
    pub fn offset(&self, r: T) -> ConvexPolygon<T> {
        if r <= T::zero() {
            return self.clone();
        }
        let n = self.vertices.len();
        let outward = |a: Config<T>, b: Config<T>| {
            let d = b - a;
            let len = d.norm();
            Config::new(d.y / len, -d.x / len)
        };
        let vertices = (0..n)
            .map(|i| {
                let prev = self.vertices[(i + n - 1) % n];
                let v = self.vertices[i];
                let next = self.vertices[(i + 1) % n];
                let n1 = outward(prev, v);
                let n2 = outward(v, next);
                let denom = T::one() + n1.dot(n2);
                v + (n1 + n2).scale(r / denom)
            })
            .collect();
        ConvexPolygon { vertices }
    }

    fn validate(&self, field: &str) -> Result<(), GeometryError> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(GeometryError::invalid(
                format!("{field}.vertices"),
                format!("needs at least 3 vertices, got {n}"),
            ));
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::invalid(
                format!("{field}.vertices"),
                "must be finite",
            ));
        }
        if self.signed_area() <= T::zero() {
            return Err(GeometryError::invalid(
                format!("{field}.vertices"),
                "must be in counter-clockwise order with positive area",
            ));
        }
        let mut turning = 0.0_f64;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            let e1 = b - a;
            let e2 = c - b;
            if e1.norm() <= T::zero() {
                return Err(GeometryError::invalid(
                    format!("{field}.vertices[{}]", (i + 1) % n),
                    "duplicate vertex",
                ));
            }
            if e1.cross(e2) < -T::geom_eps() * e1.norm() * e2.norm() {
                return Err(GeometryError::invalid(
                    format!("{field}.vertices[{}]", (i + 1) % n),
                    "polygon is not convex",
                ));
            }
            turning += e1.cross(e2).as_f64().atan2(e1.dot(e2).as_f64());
        }
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(GeometryError::invalid(
                format!("{field}.vertices"),
                "polygon winds more than once",
            ));
        }
        Ok(())
    }
}

/// Obstacle region. Serialized with a `type` tag matching the scenario format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Obstacle<T> {
    Circle(Circle<T>),
    #[serde(rename = "polygon")]
    ConvexPolygon(ConvexPolygon<T>),
    /// Union of overlapping discs; generally non-convex.
    CompositeCircles {
        circles: Vec<Circle<T>>,
    },
}

impl<T: Real> Obstacle<T> {
    pub fn circle(center: Config<T>, radius: T) -> Self {
        Obstacle::Circle(Circle::new(center, radius))
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Obstacle::CompositeCircles { .. })
    }

    /// Exact closed-region membership.
    pub fn contains(&self, p: Config<T>) -> bool {
        self.dilated_contains(p, T::zero())
    }

    /// Membership in the exact Minkowski sum of the region with a disc of radius `r`.
    pub fn dilated_contains(&self, p: Config<T>, r: T) -> bool {
        match self {
            Obstacle::Circle(c) => p.dist(c.center) <= c.radius + r,
            Obstacle::ConvexPolygon(poly) => poly.contains(p) || poly.boundary_distance(p) <= r,
            Obstacle::CompositeCircles { circles } => {
                circles.iter().any(|c| p.dist(c.center) <= c.radius + r)
            }
        }
    }

    /// Distance from `p` to the region boundary. For composites this is a
    /// lower bound: the distance to the nearest member circle boundary.
    pub fn boundary_distance(&self, p: Config<T>) -> T {
        match self {
            Obstacle::Circle(c) => (p.dist(c.center) - c.radius).abs(),
            Obstacle::ConvexPolygon(poly) => poly.boundary_distance(p),
            Obstacle::CompositeCircles { circles } => circles
                .iter()
                .map(|c| (p.dist(c.center) - c.radius).abs())
                .fold(T::infinity(), T::min),
        }
    }

    pub fn bounding_box(&self) -> Rect<T> {
        match self {
            Obstacle::Circle(c) => c.bounding_box(),
            Obstacle::ConvexPolygon(p) => p.bounding_box(),
            Obstacle::CompositeCircles { circles } => circles
                .iter()
                .map(Circle::bounding_box)
                .reduce(|a, b| Rect::around([a.min, a.max, b.min, b.max]))
                .unwrap_or_else(|| Rect::new(Config::default(), Config::default())),
        }
    }

    pub fn validate(&self, field: &str) -> Result<(), GeometryError> {
        match self {
            Obstacle::Circle(c) => c.validate(field),
            Obstacle::ConvexPolygon(p) => p.validate(field),
            Obstacle::CompositeCircles { circles } => {
                if circles.len() < 2 {
                    return Err(GeometryError::invalid(
                        format!("{field}.circles"),
                        "composite obstacle needs at least 2 circles",
                    ));
                }
                for (i, c) in circles.iter().enumerate() {
                    c.validate(&format!("{field}.circles[{i}]"))?;
                }
                // Overlap graph must be connected.
                let n = circles.len();
                let mut seen = vec![false; n];
                let mut stack = vec![0];
                seen[0] = true;
                while let Some(i) = stack.pop() {
                    for j in 0..n {
                        let overlap = circles[i].center.dist(circles[j].center)
                            < circles[i].radius + circles[j].radius;
                        if !seen[j] && overlap {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
                if let Some(j) = seen.iter().position(|s| !s) {
                    return Err(GeometryError::invalid(
                        format!("{field}.circles[{j}]"),
                        "does not overlap the rest of the composite",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Regular `m`-gon whose edges are tangent to `circle`, so it contains the disc.
fn circumscribed_polygon<T: Real>(circle: &Circle<T>, m: usize) -> ConvexPolygon<T> {
    let mf = T::lit(m as f64);
    let step = T::TAU() / mf;
    let circumradius = circle.radius / (T::PI() / mf).cos();
    let vertices = (0..m)
        .map(|k| {
            let a = step * T::lit(k as f64);
            circle.center + Config::new(a.cos(), a.sin()).scale(circumradius)
        })
        .collect();
    ConvexPolygon::new_unchecked(vertices)
}

/// Conservative convex cover of an obstacle.
///
/// Circles become one circumscribed `m`-gon, composites one `m`-gon per member,
/// and convex polygons are returned unchanged.
pub fn polyhedral_approximation<T: Real>(
    obs: &Obstacle<T>,
    m: usize,
) -> Result<Vec<ConvexPolygon<T>>, GeometryError> {
    if m < 3 {
        return Err(GeometryError::TooFewVertices(m));
    }
    Ok(match obs {
        Obstacle::Circle(c) => vec![circumscribed_polygon(c, m)],
        Obstacle::ConvexPolygon(p) => vec![p.clone()],
        Obstacle::CompositeCircles { circles } => circles
            .iter()
            .map(|c| circumscribed_polygon(c, m))
            .collect(),
    })
}

/// Grows an obstacle by `r`. Polygons use the bisector push-out, which
/// contains the exact Minkowski sum.
pub fn dilate<T: Real>(obs: &Obstacle<T>, r: T) -> Obstacle<T> {
    match obs {
        Obstacle::Circle(c) => Obstacle::Circle(Circle::new(c.center, c.radius + r)),
        Obstacle::ConvexPolygon(p) => Obstacle::ConvexPolygon(p.offset(r)),
        Obstacle::CompositeCircles { circles } => Obstacle::CompositeCircles {
            circles: circles
                .iter()
                .map(|c| Circle::new(c.center, c.radius + r))
                .collect(),
        },
    }
}
