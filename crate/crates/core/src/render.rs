//! SVG snapshots of the planar profiles.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{Component, EndCondition, Ends};
use crate::geometry::{extract_loops, self_intersections, Point};

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("nothing to draw")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvgStyle {
    #[serde(default = "default_width")]
    pub width: u32,
    /// Decimal places of every coordinate.
    #[serde(default = "default_precision")]
    pub precision: usize,
    #[serde(default = "yes")]
    pub asymptote_guides: bool,
    #[serde(default = "yes")]
    pub highlight_loops: bool,
}

fn default_width() -> u32 {
    800
}
fn default_precision() -> usize {
    4
}
fn yes() -> bool {
    true
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width: default_width(),
            precision: default_precision(),
            asymptote_guides: true,
            highlight_loops: true,
        }
    }
}

struct Fmt(usize);

impl Fmt {
    fn num(&self, v: f64) -> String {
        let s = format!("{:.*}", self.0, v);
        // no "-0.000"
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    }

    /// SVG has y pointing down.
    fn pt(&self, p: Point) -> String {
        format!("{} {}", self.num(p.re), self.num(-p.im))
    }
}

/// One `<path>` per component, a marker at the origin, dashed guides along
/// clamped asymptotes and filled polygons over self-intersection loops.
///
/// The view box is the bounding box of the nodes and the origin, padded by
/// 5 percent.
pub fn emit_svg(components: &[Component], style: &SvgStyle) -> Result<String, RenderError> {
    let all: Vec<Point> = components.iter().flat_map(|c| c.curve.nodes().iter().copied()).collect();
    if all.is_empty() {
        return Err(RenderError::Empty);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in &all {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    let size = (x1 - x0).max(y1 - y0).max(1e-9);
    let pad = 0.05 * size;
    let (vx, vy, vw, vh) = (x0 - pad, -y1 - pad, x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let f = Fmt(style.precision);
    let height = (style.width as f64 * vh / vw).round().max(1.0) as u32;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        style.width,
        height,
        f.num(vx),
        f.num(vy),
        f.num(vw),
        f.num(vh)
    );
    let stroke = f.num(0.004 * size);
    if style.asymptote_guides {
        let reach = 2.0 * size;
        for c in components {
            let Ends::Open { start, end } = c.ends else { continue };
            for e in [start, end] {
                if let EndCondition::Clamped { asymptote: Some(a) } = e {
                    let q = Point::from_polar(reach, a);
                    let _ = writeln!(
                        s,
                        r#"<line class="asymptote" x1="0" y1="0" x2="{}" y2="{}" stroke="gray" stroke-width="{stroke}" stroke-dasharray="{} {}"/>"#,
                        f.num(q.re),
                        f.num(-q.im),
                        f.num(0.02 * size),
                        f.num(0.01 * size)
                    );
                }
            }
        }
    }
    if style.highlight_loops {
        for c in components {
            for l in extract_loops(&c.curve, &self_intersections(&c.curve)) {
                if l.is_whole_curve() {
                    continue;
                }
                let pts: Vec<String> = l.loop_nodes.iter().map(|&p| f.pt(p).replace(' ', ",")).collect();
                let _ = writeln!(
                    s,
                    r#"<polygon class="loop" points="{}" fill="orange" fill-opacity="0.4" stroke="none"/>"#,
                    pts.join(" ")
                );
            }
        }
    }
    for c in components {
        let z = c.curve.nodes();
        let mut d = format!("M {}", f.pt(z[0]));
        for &p in &z[1..] {
            d.push_str(" L ");
            d.push_str(&f.pt(p));
        }
        if c.curve.is_closed() {
            d.push_str(" Z");
        }
        let _ = writeln!(
            s,
            r#"<path class="curve" data-label="{}" d="{d}" fill="none" stroke="black" stroke-width="{stroke}"/>"#,
            escape(&c.label)
        );
    }
    let _ = writeln!(
        s,
        r#"<circle class="origin" cx="0" cy="0" r="{}" fill="red"/>"#,
        f.num(0.008 * size)
    );
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::testing::{figure_eight, ray};
    use crate::geometry::PlanarCurve;

    #[test]
    fn ray_draws_one_path() {
        let c = Component::clamped("r", ray(0.5, 2.0, 0.5));
        let svg = emit_svg(&[c], &SvgStyle::default()).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches("<polygon").count(), 0);
        assert!(svg.contains(r#"class="origin""#));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn loops_are_highlighted() {
        let c = Component::closed("8", figure_eight(1.0, 200));
        let svg = emit_svg(&[c], &SvgStyle::default()).unwrap();
        assert!(svg.matches(r#"class="loop""#).count() >= 1);
    }

    #[test]
    fn coordinates_are_fixed_precision() {
        let c = Component::closed(
            "t",
            PlanarCurve::closed(vec![Point::new(0.0, 0.0), Point::new(1.0 / 3.0, -0.0), Point::new(0.0, 1.0)]).unwrap(),
        );
        let style = SvgStyle {
            precision: 2,
            ..SvgStyle::default()
        };
        let svg = emit_svg(&[c], &style).unwrap();
        assert!(svg.contains("M 0.00 0.00 L 0.33 0.00 L 0.00 -1.00 Z"), "{svg}");
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(emit_svg(&[], &SvgStyle::default()), Err(RenderError::Empty));
    }
}
