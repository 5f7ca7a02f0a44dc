use std::fmt::Write as _;
use std::io::Write;

use riskplan::geometry::dilate;
use riskplan::{Config, Obstacle, PlanOutcome, Scenario};

use crate::args::RenderArgs;
use crate::{load_scenario, output_dir, read_text, write_file, CliError, Result, EXIT_OK};

pub const SVG_FILE: &str = "render.svg";
const MARGIN: f64 = 10.0;

pub fn run(a: &RenderArgs, out: &mut dyn Write) -> Result<i32> {
    if !(a.scale.is_finite() && a.scale > 0.0) {
        return Err(CliError::Config(format!(
            "--scale must be > 0, got {}",
            a.scale
        )));
    }
    let scenario = load_scenario(a.common.scenario.as_deref())?;
    let text = read_text(&a.input)?;
    let outcome: PlanOutcome = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", a.input.display())))?;
    let svg = render_svg(&scenario, &outcome, a.scale);
    let dir = output_dir(&a.common)?;
    let path = dir.join(SVG_FILE);
    write_file(&path, svg.as_bytes())?;
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(EXIT_OK)
}

/// World-to-pixel map; y grows upward in the world and downward in SVG.
struct View {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl View {
    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.y1 - y) * self.scale
    }

    fn len(&self, l: f64) -> f64 {
        l * self.scale
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn shape(svg: &mut String, v: &View, obs: &Obstacle, class: &str) {
    let circle = |svg: &mut String, c: Config, r: f64| {
        let _ = writeln!(
            svg,
            r#"    <circle class="{class}" cx="{:.3}" cy="{:.3}" r="{:.3}"/>"#,
            v.x(c.x),
            v.y(c.y),
            v.len(r)
        );
    };
    match obs {
        Obstacle::Circle(c) => circle(svg, c.center, c.radius),
        Obstacle::CompositeCircles { circles } => {
            for c in circles {
                circle(svg, c.center, c.radius);
            }
        }
        Obstacle::ConvexPolygon(p) => {
            let points: Vec<String> = p
                .vertices
                .iter()
                .map(|q| format!("{:.3},{:.3}", v.x(q.x), v.y(q.y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"    <polygon class="{class}" points="{}"/>"#,
                points.join(" ")
            );
        }
    }
}

fn line(svg: &mut String, v: &View, a: Config, b: Config, class: &str) {
    let _ = writeln!(
        svg,
        r#"    <line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
        v.x(a.x),
        v.y(a.y),
        v.x(b.x),
        v.y(b.y)
    );
}

/// Workspace, obstacles with dashed robot-radius outlines, tree, path and
/// start/goal markers. Path segments are `<line class="path-segment">`.
pub fn render_svg(s: &Scenario, o: &PlanOutcome, scale: f64) -> String {
    let b = s.env.bounds;
    let v = View {
        x0: b.min.x,
        y1: b.max.y,
        scale,
    };
    let (w, h) = (
        v.len(b.width()) + 2.0 * MARGIN,
        v.len(b.height()) + 2.0 * MARGIN,
    );
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let status = match o.path() {
        Some(p) => format!(
            "length {:.4} m, CVaR total {:.4} m",
            p.total_euclidean, p.total_cvar
        ),
        None => "goal not reached".to_string(),
    };
    let _ = writeln!(
        svg,
        "  <title>{}</title>",
        escape(&format!(
            "{} seed {}: {status}{}",
            o.algorithm,
            o.seed,
            if s.description.is_empty() {
                String::new()
            } else {
                format!(" ({})", s.description)
            }
        ))
    );
    svg.push_str(concat!(
        "  <style>\n",
        "    .workspace { fill: #fafafa; stroke: #333; stroke-width: 1.5 }\n",
        "    .obstacle { fill: #888; stroke: none }\n",
        "    .dilated { fill: none; stroke: #555; stroke-width: 1; stroke-dasharray: 4 3 }\n",
        "    .tree-edge { stroke: #9ab; stroke-width: 0.6 }\n",
        "    .path-segment { stroke: #d22; stroke-width: 2.5; stroke-linecap: round }\n",
        "    .start { fill: #2a2 }\n",
        "    .goal { fill: #22d }\n",
        "  </style>\n",
    ));
    let _ = writeln!(
        svg,
        r#"  <rect class="workspace" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
        v.x(b.min.x),
        v.y(b.max.y),
        v.len(b.width()),
        v.len(b.height())
    );

    svg.push_str("  <g class=\"obstacles\">\n");
    for obs in &s.env.obstacles {
        shape(&mut svg, &v, obs, "obstacle");
    }
    if s.env.robot_radius > 0.0 {
        for obs in &s.env.obstacles {
            shape(&mut svg, &v, &dilate(obs, s.env.robot_radius), "dilated");
        }
    }
    svg.push_str("  </g>\n");

    if let Some(t) = &o.tree {
        svg.push_str("  <g class=\"tree\">\n");
        for (p, c) in t.edges() {
            if let (Some(a), Some(b)) = (t.configs.get(p), t.configs.get(c)) {
                line(&mut svg, &v, *a, *b, "tree-edge");
            }
        }
        svg.push_str("  </g>\n");
    }
    if let Some(p) = o.path() {
        svg.push_str("  <g class=\"path\">\n");
        for pair in p.waypoints.windows(2) {
            line(&mut svg, &v, pair[0], pair[1], "path-segment");
        }
        svg.push_str("  </g>\n");
    }

    let marker = (v.len(0.06)).max(3.0);
    for (class, q) in [("start", s.start), ("goal", s.goal)] {
        let _ = writeln!(
            svg,
            r#"  <circle class="{class}" cx="{:.3}" cy="{:.3}" r="{marker:.3}"/>"#,
            v.x(q.x),
            v.y(q.y)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
