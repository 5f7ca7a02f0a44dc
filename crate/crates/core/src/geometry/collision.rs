use super::{
    dilate, polyhedral_approximation, Circle, Config, ConvexPolygon, Environment, GeometryError,
    Obstacle, Rect, Segment, DEFAULT_APPROX_VERTICES,
};
use crate::scalar::Real;

/// A convex, already dilated collision shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape<T> {
    Disc(Circle<T>),
    Polygon(ConvexPolygon<T>),
}

impl<T: Real> Shape<T> {
    pub fn bounding_box(&self) -> Rect<T> {
        match self {
            Shape::Disc(c) => c.bounding_box(),
            Shape::Polygon(p) => p.bounding_box(),
        }
    }

    /// Closed containment; tangency counts as contact.
    pub fn contains(&self, p: Config<T>) -> bool {
        let eps = T::geom_eps();
        match self {
            Shape::Disc(c) => p.dist_sq(c.center) <= (c.radius + eps).powi(2),
            Shape::Polygon(poly) => poly.contains_eps(p, eps),
        }
    }

    pub fn boundary_distance(&self, p: Config<T>) -> T {
        match self {
            Shape::Disc(c) => (p.dist(c.center) - c.radius).abs(),
            Shape::Polygon(poly) => poly.boundary_distance(p),
        }
    }

    pub fn intersects_segment(&self, seg: &Segment<T>) -> bool {
        let eps = T::geom_eps();
        match self {
            Shape::Disc(c) => seg.dist_sq_to(c.center) <= (c.radius + eps).powi(2),
            Shape::Polygon(poly) => segment_hits_polygon(seg, poly, eps),
        }
    }
}

/// Separating-axis test between a segment and a convex polygon. The pair is
/// disjoint only if some axis separates the projections by more than `eps`.
fn segment_hits_polygon<T: Real>(seg: &Segment<T>, poly: &ConvexPolygon<T>, eps: T) -> bool {
    let separated_on = |axis: Config<T>| {
        let len = axis.norm();
        if len <= T::zero() {
            return false;
        }
        let axis = axis.scale(len.recip());
        let (mut pmin, mut pmax) = (T::infinity(), T::neg_infinity());
        for v in &poly.vertices {
            let d = v.dot(axis);
            pmin = pmin.min(d);
            pmax = pmax.max(d);
        }
        let (sa, sb) = (seg.a.dot(axis), seg.b.dot(axis));
        let (smin, smax) = (sa.min(sb), sa.max(sb));
        smax < pmin - eps || smin > pmax + eps
    };
    let edge_normals = poly.edges().map(|e| {
        let d = e.b - e.a;
        Config::new(d.y, -d.x)
    });
    let d = seg.b - seg.a;
    let seg_normal = Config::new(-d.y, d.x);
    !edge_normals
        .chain(std::iter::once(seg_normal))
        .any(separated_on)
}

/// Collision world prepared once per environment: non-convex obstacles
/// replaced by their polyhedral cover, everything dilated by the robot
/// radius, and the workspace boundary treated as a wall.
#[derive(Debug, Clone)]
pub struct CollisionChecker<T> {
    bounds: Rect<T>,
    shapes: Vec<(Shape<T>, Rect<T>)>,
    approx_vertices: usize,
}

impl<T: Real> CollisionChecker<T> {
    pub fn new(env: &Environment<T>, approx_vertices: usize) -> Result<Self, GeometryError> {
        if approx_vertices < 3 {
            return Err(GeometryError::TooFewVertices(approx_vertices));
        }
        let r = env.robot_radius;
        let mut shapes = Vec::new();
        for obs in &env.obstacles {
            if obs.is_convex() {
                match dilate(obs, r) {
                    Obstacle::Circle(c) => shapes.push(Shape::Disc(c)),
                    Obstacle::ConvexPolygon(p) => shapes.push(Shape::Polygon(p)),
                    Obstacle::CompositeCircles { .. } => unreachable!("composites are non-convex"),
                }
            } else {
                for poly in polyhedral_approximation(obs, approx_vertices)? {
                    shapes.push(Shape::Polygon(poly.offset(r)));
                }
            }
        }
        let shapes = shapes
            .into_iter()
            .map(|s| {
                let bb = s.bounding_box();
                (s, bb)
            })
            .collect();
        Ok(CollisionChecker {
            bounds: env.bounds,
            shapes,
            approx_vertices,
        })
    }

    pub fn bounds(&self) -> Rect<T> {
        self.bounds
    }

    pub fn approx_vertices(&self) -> usize {
        self.approx_vertices
    }

    pub fn shapes(&self) -> impl Iterator<Item = &Shape<T>> {
        self.shapes.iter().map(|(s, _)| s)
    }

    pub fn point_free(&self, p: Config<T>) -> bool {
        if !p.is_finite() || !self.bounds.contains(p) {
            return false;
        }
        let eps = T::geom_eps();
        self.shapes.iter().all(|(shape, bb)| {
            let culled = p.x < bb.min.x - eps
                || p.x > bb.max.x + eps
                || p.y < bb.min.y - eps
                || p.y > bb.max.y + eps;
            culled || !shape.contains(p)
        })
    }

    pub fn segment_free(&self, seg: &Segment<T>) -> bool {
        if !seg.a.is_finite() || !seg.b.is_finite() {
            return false;
        }
        if !self.bounds.contains(seg.a) || !self.bounds.contains(seg.b) {
            return false;
        }
        let sbb = Rect::around([seg.a, seg.b]).inflate(T::geom_eps());
        self.shapes
            .iter()
            .all(|(shape, bb)| !sbb.overlaps(bb) || !shape.intersects_segment(seg))
    }

    /// Distance from `p` to the nearest prepared shape boundary.
    pub fn boundary_distance(&self, p: Config<T>) -> T {
        self.shapes
            .iter()
            .map(|(s, _)| s.boundary_distance(p))
            .fold(T::infinity(), T::min)
    }
}

/// True iff `q` lies inside the workspace and outside every obstacle grown by
/// the robot radius (exact Minkowski sums, closed regions).
pub fn point_in_free_space<T: Real>(q: Config<T>, env: &Environment<T>) -> bool {
    q.is_finite()
        && env.bounds.contains(q)
        && env
            .obstacles
            .iter()
            .all(|o| !o.dilated_contains(q, env.robot_radius))
}

/// Collision test for one edge against the environment, using the default
/// polygon vertex count for non-convex obstacles.
pub fn segment_collision_free<T: Real>(seg: &Segment<T>, env: &Environment<T>) -> bool {
    match CollisionChecker::new(env, DEFAULT_APPROX_VERTICES) {
        Ok(checker) => checker.segment_free(seg),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env_with(obstacles: Vec<Obstacle<f64>>, r: f64) -> Environment<f64> {
        Environment {
            bounds: Rect::from([0.0, 0.0, 5.0, 5.0]),
            obstacles,
            robot_radius: r,
            grid_resolution: (0.05, 0.05),
        }
    }

    #[test]
    fn free_point_in_empty_world() {
        let env = env_with(vec![], 0.1);
        assert!(point_in_free_space(Config::new(2.5, 2.5), &env));
        assert!(!point_in_free_space(Config::new(5.5, 2.5), &env));
        assert!(!point_in_free_space(Config::new(f64::NAN, 2.5), &env));
    }

    #[test]
    fn circle_center_and_dilated_rim() {
        let env = env_with(vec![Obstacle::circle(Config::new(2.0, 2.0), 0.5)], 0.1);
        assert!(!point_in_free_space(Config::new(2.0, 2.0), &env));
        let just_inside = Config::new(2.0 + 0.5 + 0.1 - 1e-6, 2.0);
        assert!(!point_in_free_space(just_inside, &env));
        let just_outside = Config::new(2.0 + 0.5 + 0.1 + 1e-6, 2.0);
        assert!(point_in_free_space(just_outside, &env));
    }

    #[test]
    fn segment_far_from_obstacles_is_free() {
        let env = env_with(vec![Obstacle::circle(Config::new(4.0, 4.0), 0.5)], 0.1);
        let seg = Segment::new(Config::new(0.5, 0.5), Config::new(2.0, 1.0));
        assert!(segment_collision_free(&seg, &env));
    }

    #[test]
    fn chord_through_center_collides() {
        let env = env_with(vec![Obstacle::circle(Config::new(2.0, 2.0), 0.3)], 0.0);
        let seg = Segment::new(Config::new(1.0, 1.0), Config::new(3.0, 3.0));
        assert!(!segment_collision_free(&seg, &env));
        assert!(!segment_collision_free(&seg.reversed(), &env));
    }

    #[test]
    fn tangency_counts_as_collision() {
        let env = env_with(vec![Obstacle::circle(Config::new(2.0, 2.0), 0.5)], 0.0);
        let tangent = Segment::new(Config::new(1.0, 2.5), Config::new(3.0, 2.5));
        assert!(!segment_collision_free(&tangent, &env));
        let clear = Segment::new(Config::new(1.0, 2.5 + 1e-6), Config::new(3.0, 2.5 + 1e-6));
        assert!(segment_collision_free(&clear, &env));
    }

    #[test]
    fn leaving_bounds_collides() {
        let env = env_with(vec![], 0.0);
        let seg = Segment::new(Config::new(4.0, 4.0), Config::new(5.5, 4.0));
        assert!(!segment_collision_free(&seg, &env));
    }

    #[test]
    fn polygon_segment_cases() {
        let sq = ConvexPolygon::new(vec![
            Config::new(1.0, 1.0),
            Config::new(2.0, 1.0),
            Config::new(2.0, 2.0),
            Config::new(1.0, 2.0),
        ])
        .unwrap();
        let env = env_with(vec![Obstacle::ConvexPolygon(sq)], 0.0);
        let through = Segment::new(Config::new(0.5, 1.5), Config::new(2.5, 1.5));
        let inside = Segment::new(Config::new(1.2, 1.2), Config::new(1.8, 1.8));
        let miss = Segment::new(Config::new(0.5, 0.5), Config::new(2.5, 0.9));
        let corner_clip = Segment::new(Config::new(1.4, 0.5), Config::new(2.5, 1.6));
        assert!(!segment_collision_free(&through, &env));
        assert!(!segment_collision_free(&inside, &env));
        assert!(segment_collision_free(&miss, &env));
        assert!(!segment_collision_free(&corner_clip, &env));
    }

    #[test]
    fn composite_uses_polygon_cover() {
        let comp = Obstacle::CompositeCircles {
            circles: vec![
                Circle::new(Config::new(2.0, 2.0), 0.4),
                Circle::new(Config::new(2.5, 2.0), 0.4),
            ],
        };
        let env = env_with(vec![comp], 0.0);
        let checker = CollisionChecker::new(&env, 8).unwrap();
        assert_eq!(checker.shapes().count(), 2);
        // Octagon corners stick out beyond the disc along 0 degrees.
        let r_out = 0.4 / (std::f64::consts::PI / 8.0).cos();
        let p = Config::new(2.5 + (0.4 + r_out) / 2.0, 2.0);
        assert!(!checker.point_free(p));
        assert!(point_in_free_space(p, &env));
    }
}
