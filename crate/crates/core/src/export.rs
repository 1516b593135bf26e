//! Serialization of portraits, orientation fields, and trajectories.
//!
//! All three formats are deterministic byte-for-byte for fixed inputs:
//! SVG (a small subset: `svg`, `polyline`, `circle`, `rect`, `line`),
//! binary PGM (P5), and RFC-4180-style CSV with LF line endings.

use std::fmt::Write as _;

use crate::geom::Point;
use crate::integrate::Trajectory;
use crate::portrait::{OrientationField, Portrait, TrajectoryRole};

use crate::equilibrium::EquilibriumKind;

/// Visual parameters for [`render_svg`].
#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub canvas_width: u32,
    pub canvas_height: u32,
    pub stroke_width: f64,
    pub streamline_color: String,
    pub separatrix_color: String,
    /// Base half-size of the equilibrium glyphs, in pixels.
    pub glyph_size: f64,
    /// Decimal places for coordinates, clamped to 1..=6.
    pub precision: usize,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            canvas_width: 800,
            canvas_height: 600,
            stroke_width: 1.0,
            streamline_color: "#1f77b4".to_string(),
            separatrix_color: "#d62728".to_string(),
            glyph_size: 5.0,
            precision: 3,
        }
    }
}

const AXIS_COLOR: &str = "#bbbbbb";
const GLYPH_COLOR: &str = "#000000";

/// Renders a portrait as SVG text: one polyline per trajectory under the
/// affine window-to-viewport map (y axis flipped), the coordinate axes,
/// and one glyph per equilibrium — circle for center/focus kinds, filled
/// square for nodes, cross for cusps, diamond for everything else.
pub fn render_svg(portrait: &Portrait, style: &SvgStyle) -> String {
    let precision = style.precision.clamp(1, 6);
    let w = style.canvas_width as f64;
    let h = style.canvas_height as f64;
    let win = &portrait.window;
    let map = |p: Point| -> (f64, f64) {
        (
            (p[0] - win.x_min) / win.width() * w,
            (win.y_max - p[1]) / win.height() * h,
        )
    };
    let num = |v: f64| format!("{v:.precision$}");

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        style.canvas_width, style.canvas_height, style.canvas_width, style.canvas_height
    );

    // coordinate axes, when visible in the window
    if win.y_min < 0.0 && 0.0 < win.y_max {
        let (_, py) = map([win.x_min, 0.0]);
        let _ = writeln!(
            svg,
            "<line x1=\"0\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"{AXIS_COLOR}\" stroke-width=\"1\"/>",
            num(py),
            num(w),
        );
    }
    if win.x_min < 0.0 && 0.0 < win.x_max {
        let (px, _) = map([0.0, win.y_min]);
        let _ = writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"0\" x2=\"{0}\" y2=\"{1}\" stroke=\"{AXIS_COLOR}\" stroke-width=\"1\"/>",
            num(px),
            num(h),
        );
    }

    for pt in &portrait.trajectories {
        let color = match pt.role {
            TrajectoryRole::Streamline => &style.streamline_color,
            TrajectoryRole::Separatrix => &style.separatrix_color,
        };
        let mut points = String::new();
        for (i, s) in pt.trajectory.samples.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let (px, py) = map(s.point());
            let _ = write!(points, "{},{}", num(px), num(py));
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\" points=\"{points}\"/>",
            style.stroke_width,
        );
    }

    for report in &portrait.equilibria {
        let (cx, cy) = map(report.location);
        let g = style.glyph_size;
        use EquilibriumKind::*;
        match report.kind {
            Center | StableFocus | UnstableFocus | FocusOrCenter => {
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{GLYPH_COLOR}\" stroke-width=\"{}\"/>",
                    num(cx),
                    num(cy),
                    num(g),
                    style.stroke_width,
                );
            }
            StableNode | UnstableNode | DegenerateNode | NodeDegenerateTheorem => {
                let _ = writeln!(
                    svg,
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{GLYPH_COLOR}\"/>",
                    num(cx - g),
                    num(cy - g),
                    num(2.0 * g),
                    num(2.0 * g),
                );
            }
            Cusp => {
                for sign in [1.0, -1.0] {
                    let _ = writeln!(
                        svg,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{GLYPH_COLOR}\" stroke-width=\"{}\"/>",
                        num(cx - g),
                        num(cy - sign * g),
                        num(cx + g),
                        num(cy + sign * g),
                        style.stroke_width,
                    );
                }
            }
            _ => {
                let _ = writeln!(
                    svg,
                    "<polyline fill=\"none\" stroke=\"{GLYPH_COLOR}\" stroke-width=\"{}\" points=\"{},{} {},{} {},{} {},{} {},{}\"/>",
                    style.stroke_width,
                    num(cx),
                    num(cy - g),
                    num(cx + g),
                    num(cy),
                    num(cx),
                    num(cy + g),
                    num(cx - g),
                    num(cy),
                    num(cx),
                    num(cy - g),
                );
            }
        }
    }

    svg.push_str("</svg>\n");
    svg
}

/// Serializes an orientation field as binary PGM (P5, maxval 255).
/// Unmasked cells map `[0, pi)` onto the gray ramp `[0, 254]` via
/// `round(255 * angle / pi)` clamped at 254; the value 255 is reserved
/// as the in-band mask sentinel. Rows are written top first.
pub fn write_pgm(of: &OrientationField) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", of.width(), of.height()).into_bytes();
    for iy in 0..of.height() {
        for ix in 0..of.width() {
            let byte = match of.angle(ix, iy) {
                Some(angle) => {
                    let gray = (255.0 * angle / std::f64::consts::PI).round();
                    (gray as u8).min(254)
                }
                None => 255,
            };
            out.push(byte);
        }
    }
    out
}

/// Serializes a trajectory as CSV with header `t,x,y`, one row per
/// sample, shortest round-trip decimal formatting, and LF endings.
/// Parsing the text back reproduces the samples exactly.
pub fn write_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,x,y\n");
    for s in &traj.samples {
        let _ = writeln!(out, "{},{},{}", s.t, s.x, s.y);
    }
    out
}
