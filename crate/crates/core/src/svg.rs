//! SVG drawing of an instance and its buses.
//!
//! The y-axis points up: all geometry sits in a group flipped by
//! `scale(1,-1)`, so coordinates in the file are the instance coordinates
//! multiplied by `options.scale`.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::model::{compute_spans, validate_planarity, BusLayout, ColorId, ColoredPointSet, EpsilonPolicy, Violation};

const WARNING: &str = "#d00000";

#[derive(Debug, Clone, Copy)]
pub struct SvgOptions {
    /// Pixels per instance unit.
    pub scale: f64,
    pub margin: f64,
    pub point_radius: f64,
    /// Separation used when looking for violations to highlight.
    pub epsilon: EpsilonPolicy,
    /// Draw buses and connections involved in a violation in red.
    pub highlight_violations: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            scale: 1.0,
            margin: 20.0,
            point_radius: 4.0,
            epsilon: EpsilonPolicy::ZERO,
            highlight_violations: true,
        }
    }
}

fn color_of(c: ColorId) -> String {
    format!("hsl({},70%,42%)", (c.0 * 137) % 360)
}

/// Renders points as circles, buses as thick horizontal lines and
/// connections as thin vertical lines. Output depends only on the inputs.
pub fn render_svg(instance: &ColoredPointSet, layout: &BusLayout, options: &SvgOptions) -> String {
    let s = options.scale;
    let pts = instance.points();
    let mut ys: Vec<f64> = pts.iter().map(|p| p.y.to_f64()).collect();
    ys.extend(layout.ys().iter().map(|y| y.to_f64()));
    let xs: Vec<f64> = pts.iter().map(|p| p.x.to_f64()).collect();
    let bounds = |v: &[f64]| {
        v.iter().fold(None, |acc: Option<(f64, f64)>, &x| Some(acc.map_or((x, x), |(lo, hi)| (lo.min(x), hi.max(x)))))
    };
    let (x0, x1) = bounds(&xs).unwrap_or((0.0, 0.0));
    let (y0, y1) = bounds(&ys).unwrap_or((0.0, 0.0));
    let m = options.margin;
    let width = (x1 - x0) * s + 2.0 * m;
    let height = (y1 - y0) * s + 2.0 * m;

    let mut bad_buses: HashSet<ColorId> = HashSet::new();
    let mut bad_points: HashSet<usize> = HashSet::new();
    if options.highlight_violations {
        for v in validate_planarity(instance, layout, options.epsilon).unwrap_or_default() {
            match v {
                Violation::ConnectionCrossing { point, bus } | Violation::PointOnBus { point, bus } => {
                    bad_points.insert(point);
                    bad_buses.insert(bus);
                }
                Violation::BusOverlap { a, b } => {
                    bad_buses.insert(a);
                    bad_buses.insert(b);
                }
                Violation::TooClose { point, .. } => {
                    bad_points.insert(point);
                }
                Violation::ConnectionOverlap { a, b } => {
                    bad_points.insert(a);
                    bad_points.insert(b);
                }
            }
        }
    }

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    )
    .unwrap();
    writeln!(out, r#"<g transform="translate({:.2},{:.2}) scale(1,-1)">"#, m - x0 * s, m + y1 * s).unwrap();
    let stroke = |bad: bool, c: ColorId| if bad { WARNING.to_string() } else { color_of(c) };
    if layout.len() == instance.k() {
        for (i, p) in pts.iter().enumerate() {
            writeln!(
                out,
                r#"<line class="connection" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{}" stroke-width="1"/>"#,
                p.y.to_f64() * s,
                layout.y(p.color).to_f64() * s,
                stroke(bad_points.contains(&i), p.color),
                x = p.x.to_f64() * s,
            )
            .unwrap();
        }
        for span in compute_spans(instance) {
            let c = span.color;
            writeln!(
                out,
                r#"<line class="bus" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="3"/>"#,
                span.x_left.to_f64() * s,
                span.x_right.to_f64() * s,
                stroke(bad_buses.contains(&c), c),
                y = layout.y(c).to_f64() * s,
            )
            .unwrap();
        }
    }
    for p in pts {
        writeln!(
            out,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{}"/>"#,
            p.x.to_f64() * s,
            p.y.to_f64() * s,
            options.point_radius,
            color_of(p.color)
        )
        .unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}
