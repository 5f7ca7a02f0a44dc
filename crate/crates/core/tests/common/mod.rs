//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use riskplan::geometry::{Config, Shape};
use riskplan::rng::stream;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

pub fn erf_quad(x: f64) -> f64 {
    simpson(|t| (-t * t).exp(), 0.0, x, 4000) * 2.0 / std::f64::consts::PI.sqrt()
}

pub fn phi_quad(z: f64) -> f64 {
    0.5 * (1.0 + erf_quad(z / std::f64::consts::SQRT_2))
}

/// Standard normals by Box-Muller, independent of the library sampler.
pub fn normals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = stream(seed, &[0xB0C5]);
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        out.push(r * t.cos());
        out.push(r * t.sin());
    }
    out.truncate(n);
    out
}

/// `KL(N(m1, s1^2) || N(m2, s2^2))` by quadrature of `p log(p / q)`.
pub fn kl_quad(m1: f64, s1: f64, m2: f64, s2: f64) -> f64 {
    let pdf = |x: f64, m: f64, s: f64| {
        (-(x - m).powi(2) / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
    };
    simpson(
        |x| {
            let p = pdf(x, m1, s1);
            if p == 0.0 {
                0.0
            } else {
                p * (p / pdf(x, m2, s2)).ln()
            }
        },
        m1 - 14.0 * s1,
        m1 + 14.0 * s1,
        200_000,
    )
}

/// Closed point-in-convex-polygon by edge cross products (CCW vertices).
pub fn inside_polygon(v: &[Config<f64>], p: Config<f64>) -> bool {
    (0..v.len()).all(|i| {
        let a = v[i];
        let b = v[(i + 1) % v.len()];
        (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0
    })
}

pub fn point_seg_dist(p: Config<f64>, a: Config<f64>, b: Config<f64>) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((a.x + t * dx - p.x).powi(2) + (a.y + t * dy - p.y).powi(2)).sqrt()
}

pub fn polygon_boundary_dist(v: &[Config<f64>], p: Config<f64>) -> f64 {
    (0..v.len())
        .map(|i| point_seg_dist(p, v[i], v[(i + 1) % v.len()]))
        .fold(f64::INFINITY, f64::min)
}

pub fn shape_inside(s: &Shape<f64>, p: Config<f64>) -> bool {
    match s {
        Shape::Disc(d) => {
            ((p.x - d.center.x).powi(2) + (p.y - d.center.y).powi(2)).sqrt() <= d.radius
        }
        Shape::Polygon(poly) => inside_polygon(&poly.vertices, p),
    }
}

pub fn shape_boundary_dist(s: &Shape<f64>, p: Config<f64>) -> f64 {
    match s {
        Shape::Disc(d) => {
            (((p.x - d.center.x).powi(2) + (p.y - d.center.y).powi(2)).sqrt() - d.radius).abs()
        }
        Shape::Polygon(poly) => polygon_boundary_dist(&poly.vertices, p),
    }
}

/// Whether the segment hits any shape, judged from 1000 evenly spaced points.
/// `None` when a sampled point lies within 1e-3 of a shape boundary, where
/// the sampling cannot be trusted.
pub fn dense_segment_hit(shapes: &[Shape<f64>], a: Config<f64>, b: Config<f64>) -> Option<bool> {
    let mut hit = false;
    for k in 0..1000 {
        let t = k as f64 / 999.0;
        let p = Config::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
        for s in shapes {
            if shape_boundary_dist(s, p) <= 1e-3 {
                return None;
            }
            hit |= shape_inside(s, p);
        }
    }
    Some(hit)
}

/// Coefficient of determination of the least-squares line through `(x, y)`.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}
