//! Hand-written SVG renderings of polyline configurations, cones and grids.

use std::fmt::Write;
use tfl::geom::Vec2;
use tfl::gridmin::LabelGrid;
use tfl::polyconfig::PolyConfig;

const SIZE: f64 = 480.0;
const FLUID_COLORS: [&str; 3] = ["#4e79a7", "#f28e2b", "#59a14f"];
const FROZEN_COLORS: [&str; 3] = ["#2b4a6b", "#9a5a1c", "#356330"];
const PAIR_COLORS: [&str; 3] = ["#e15759", "#76b7b2", "#b07aa1"];

/// Maps world coordinates in `[-extent, extent]²` onto the canvas, y up.
struct View {
    extent: f64,
}

impl View {
    fn map(&self, p: Vec2) -> (f64, f64) {
        let s = SIZE / (2.0 * self.extent);
        ((p.x + self.extent) * s, (self.extent - p.y) * s)
    }

    fn len(&self, l: f64) -> f64 {
        l * SIZE / (2.0 * self.extent)
    }
}

fn header() -> String {
    format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n")
}

fn pair_color(pair: [u8; 2]) -> &'static str {
    match pair {
        [0, 1] => PAIR_COLORS[0],
        [0, 2] => PAIR_COLORS[1],
        _ => PAIR_COLORS[2],
    }
}

fn marker(out: &mut String, v: &View, p: Vec2) {
    let (x, y) = v.map(p);
    let _ = writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"4\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>");
}

/// Interfaces as polylines colored by fluid pair, the domain circle and
/// optional junction markers.
pub fn polyconfig_svg(c: &PolyConfig, junctions: &[Vec2]) -> String {
    let v = View {
        extent: 1.05 * c.domain_radius,
    };
    let mut out = header();
    let (cx, cy) = v.map(Vec2::ZERO);
    let _ = writeln!(
        out,
        "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>",
        v.len(c.domain_radius)
    );
    for iface in &c.interfaces {
        let pts: Vec<String> = iface
            .points
            .iter()
            .map(|&p| {
                let (x, y) = v.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
            pts.join(" "),
            pair_color(iface.pair)
        );
    }
    for &j in junctions {
        marker(&mut out, &v, j);
    }
    out.push_str("</svg>\n");
    out
}

/// One square per in-domain cell, frozen cells darker, plus junction markers.
pub fn grid_svg(g: &LabelGrid, junctions: &[Vec2]) -> String {
    let half = 0.5 * g.width().max(g.height()) as f64 * g.h();
    let v = View { extent: half };
    let mut out = header();
    let side = v.len(g.h());
    for row in 0..g.height() {
        for col in 0..g.width() {
            if !g.in_domain(row, col) {
                continue;
            }
            let l = g.label(row, col) as usize;
            let color = if g.is_frozen(row, col) {
                FROZEN_COLORS[l]
            } else {
                FLUID_COLORS[l]
            };
            let c = g.center(row, col);
            let (x, y) = v.map(c + Vec2::new(-0.5 * g.h(), 0.5 * g.h()));
            let _ = writeln!(
                out,
                "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{side:.3}\" height=\"{side:.3}\" fill=\"{color}\"/>"
            );
        }
    }
    for &j in junctions {
        marker(&mut out, &v, j);
    }
    out.push_str("</svg>\n");
    out
}

/// Polyline energy trace.
pub fn trace_svg(values: &[f64]) -> String {
    let mut out = header();
    if values.len() < 2 {
        out.push_str("</svg>\n");
        return out;
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pts: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let x = 20.0 + (SIZE - 40.0) * k as f64 / (values.len() - 1) as f64;
            let y = SIZE - 20.0 - (SIZE - 40.0) * (e - lo) / span;
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
        pts.join(" ")
    );
    out.push_str("</svg>\n");
    out
}
