mod common;

use common::{dense_segment_hit, inside_polygon, point_seg_dist};
use rand::Rng;
use riskplan::geometry::{
    dilate, polyhedral_approximation, Circle, CollisionChecker, Config, ConvexPolygon, Environment,
    Obstacle, Rect, Segment,
};
use riskplan::rng::stream;
use riskplan::{build_benchmark_scenario, point_in_free_space, segment_collision_free, Scenario};

fn c(x: f64, y: f64) -> Config<f64> {
    Config::new(x, y)
}

fn benchmark() -> Scenario {
    build_benchmark_scenario(None).unwrap()
}

#[test]
fn dilated_rim_is_not_free() {
    let env = Environment::new(
        Rect::from([0.0, 0.0, 4.0, 4.0]),
        vec![Obstacle::circle(c(2.0, 2.0), 0.5)],
        0.2,
        (0.05, 0.05),
    );
    let d = 0.5 + 0.2;
    assert!(!point_in_free_space(c(2.0 + d - 1e-6, 2.0), &env));
    assert!(point_in_free_space(c(2.0 + d + 1e-6, 2.0), &env));
    assert!(!point_in_free_space(c(2.0, 2.0), &env));
    assert!(point_in_free_space(c(0.1, 0.1), &env));
    assert!(!point_in_free_space(c(-0.1, 0.1), &env));
}

#[test]
fn segment_test_matches_dense_sampling() {
    let s = benchmark();
    let checker = CollisionChecker::new(&s.env, 16).unwrap();
    let shapes: Vec<_> = checker.shapes().cloned().collect();
    let b = s.env.bounds;
    let mut rng = stream(31, &[]);
    let (mut compared, mut colliding) = (0, 0);
    for _ in 0..10_000 {
        let a = c(
            rng.random_range(b.min.x..b.max.x),
            rng.random_range(b.min.y..b.max.y),
        );
        let e = c(
            rng.random_range(b.min.x..b.max.x),
            rng.random_range(b.min.y..b.max.y),
        );
        let Some(hit) = dense_segment_hit(&shapes, a, e) else {
            continue;
        };
        compared += 1;
        colliding += hit as usize;
        assert_eq!(
            checker.segment_free(&Segment::new(a, e)),
            !hit,
            "{a:?} -> {e:?}"
        );
        assert_eq!(segment_collision_free(&Segment::new(a, e), &s.env), !hit);
    }
    // Crossing segments usually pass within 1e-3 of a boundary and are skipped.
    assert!(compared > 2000 && colliding > 150, "{compared} {colliding}");
}

#[test]
fn free_segments_are_symmetric_and_have_free_samples() {
    let s = benchmark();
    let checker = CollisionChecker::new(&s.env, 16).unwrap();
    let mut rng = stream(32, &[]);
    let mut free = 0;
    for _ in 0..10_000 {
        let a = c(rng.random_range(-0.2..5.2), rng.random_range(-0.2..5.2));
        let len = rng.random_range(0.0..1.5);
        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let e = c(a.x + len * th.cos(), a.y + len * th.sin());
        let seg = Segment::new(a, e);
        let ok = checker.segment_free(&seg);
        assert_eq!(ok, checker.segment_free(&seg.reversed()));
        if ok {
            free += 1;
            for p in [a, e, seg.midpoint()] {
                assert!(point_in_free_space(p, &s.env));
            }
        }
    }
    assert!(free > 1000);
}

#[test]
fn polygon_covers_contain_their_obstacles() {
    let s = benchmark();
    let mut rng = stream(33, &[]);
    for obs in &s.env.obstacles {
        for m in [3, 5, 8, 16, 64] {
            let polys = polyhedral_approximation(obs, m).unwrap();
            let bb = obs.bounding_box();
            let mut inside = 0;
            for _ in 0..10_000 {
                let p = c(
                    rng.random_range(bb.min.x..bb.max.x),
                    rng.random_range(bb.min.y..bb.max.y),
                );
                if obs.contains(p) {
                    inside += 1;
                    assert!(
                        polys.iter().any(|poly| inside_polygon(&poly.vertices, p)),
                        "m = {m}, {p:?}"
                    );
                }
            }
            assert!(inside > 5000);
        }
    }
    assert!(polyhedral_approximation(&s.env.obstacles[0], 2).is_err());
}

#[test]
fn polygon_dilation_contains_minkowski_sum_and_is_monotone() {
    let mut rng = stream(34, &[]);
    for _ in 0..50 {
        // Random convex polygon: sorted angles on an ellipse.
        let n = rng.random_range(3..9);
        let mut angles: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        angles.dedup_by(|a, b| (*a - *b).abs() < 0.2);
        if angles.len() < 3 {
            continue;
        }
        let (rx, ry) = (rng.random_range(0.3..1.5), rng.random_range(0.3..1.5));
        let verts: Vec<_> = angles
            .iter()
            .map(|a| c(2.0 + rx * a.cos(), 2.0 + ry * a.sin()))
            .collect();
        let Ok(poly) = ConvexPolygon::new(verts) else {
            continue;
        };
        let obs = Obstacle::ConvexPolygon(poly.clone());
        let r1 = rng.random_range(0.0..0.3);
        let r2 = r1 + rng.random_range(0.0..0.3);
        let (Obstacle::ConvexPolygon(d1), Obstacle::ConvexPolygon(d2)) =
            (dilate(&obs, r1), dilate(&obs, r2))
        else {
            panic!("polygon dilation changed the variant");
        };
        for _ in 0..2000 {
            let p = c(rng.random_range(0.0..4.0), rng.random_range(0.0..4.0));
            let v = &poly.vertices;
            let dist = (0..v.len())
                .map(|i| point_seg_dist(p, v[i], v[(i + 1) % v.len()]))
                .fold(f64::INFINITY, f64::min);
            let in_sum = inside_polygon(v, p) || dist <= r1 - 1e-9;
            if in_sum {
                assert!(
                    inside_polygon(&d1.vertices, p),
                    "Minkowski point outside the offset polygon"
                );
            }
            if inside_polygon(&d1.vertices, p) {
                assert!(d2.contains_eps(p, 1e-9));
            }
        }
    }
}

#[test]
fn circle_dilation_is_monotone_and_zero_is_identity() {
    let circle = Obstacle::Circle(Circle::new(c(1.0, 1.0), 0.3));
    assert_eq!(dilate(&circle, 0.0), circle);
    let comp = Obstacle::CompositeCircles {
        circles: vec![Circle::new(c(0.0, 0.0), 0.5), Circle::new(c(0.6, 0.0), 0.4)],
    };
    let grown = dilate(&comp, 0.1);
    let mut rng = stream(35, &[]);
    for _ in 0..10_000 {
        let p = c(rng.random_range(-1.0..2.0), rng.random_range(-1.0..1.0));
        if comp.contains(p) {
            assert!(grown.contains(p));
        }
        assert_eq!(grown.contains(p), comp.dilated_contains(p, 0.1));
    }
}

#[test]
fn environment_rejects_bad_documents() {
    let bad = [
        r#"{"bounds":[0,0,0,1],"resolution":[0.1,0.1],"obstacles":[]}"#,
        r#"{"bounds":[0,0,1,1],"robot_radius":-1,"resolution":[0.1,0.1],"obstacles":[]}"#,
        r#"{"bounds":[0,0,1,1],"resolution":[0.1,0.1],"obstacles":[{"type":"circle","center":[0.5,0.5],"radius":0}]}"#,
        r#"{"bounds":[0,0,1,1],"resolution":[0.1,0.1],"obstacles":[{"type":"polygon","vertices":[[0,0],[0,1],[1,0]]}]}"#,
        r#"{"bounds":[0,0,1,1],"resolution":[0.1,0.1],"obstacles":[{"type":"circle","center":[0.5,0.5],"radius":5}]}"#,
    ];
    for doc in bad {
        assert!(Environment::<f64>::from_json(doc).is_err(), "{doc}");
    }
}

#[test]
fn f32_checker_agrees_on_clear_cases() {
    let env = Environment::<f32>::new(
        Rect::from([0.0, 0.0, 4.0, 4.0]),
        vec![Obstacle::circle(Config::new(2.0, 2.0), 0.5)],
        0.1,
        (0.05, 0.05),
    );
    let checker = CollisionChecker::new(&env, 16).unwrap();
    assert!(!checker.segment_free(&Segment::new(Config::new(0.5, 2.0), Config::new(3.5, 2.0))));
    assert!(checker.segment_free(&Segment::new(Config::new(0.5, 0.5), Config::new(3.5, 0.5))));
}
