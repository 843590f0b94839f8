use serde::{Deserialize, Serialize};

use super::{cross, point_set_diameter, self_intersections, wrap_angle, Crossing, PlanarCurve, Point};

/// A closed sub-polyline cut out of a curve at a self-crossing, or the whole
/// curve for an embedded closed curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopDescriptor {
    pub crossing: Point,
    /// The two crossing segments, `None` for a whole embedded closed curve.
    pub segment_indices: Option<(usize, usize)>,
    /// Crossing point followed by the curve nodes strictly inside the loop.
    pub loop_nodes: Vec<Point>,
    /// Shoelace area, positive for counter-clockwise traversal.
    pub area: f64,
    /// Turning at the crossing vertex, positive where the loop is locally
    /// convex.
    pub exterior_angle: f64,
    pub winds_origin: i32,
    pub diameter: f64,
    pub length: f64,
    /// True when the loop range is not the unique natural choice: it contains
    /// other crossings, or both sides of a closed curve are equally short.
    pub ambiguous: bool,
    /// True when the loop goes the long way round a closed curve, i.e. it
    /// consists of the nodes after the second crossing segment and before
    /// the first.
    pub wraps: bool,
}

impl LoopDescriptor {
    pub fn is_whole_curve(&self) -> bool {
        self.segment_indices.is_none()
    }
}

/// Shoelace signed area of a polygon given without its closing node.
pub fn shoelace_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    0.5 * (0..n).map(|k| cross(poly[k], poly[(k + 1) % n])).sum::<f64>()
}

/// Winding number of a closed polygon about `p`.
pub fn winding_number(poly: &[Point], p: Point) -> i32 {
    let n = poly.len();
    let total: f64 = (0..n)
        .map(|k| wrap_angle((poly[(k + 1) % n] - p).arg() - (poly[k] - p).arg()))
        .sum();
    (total / std::f64::consts::TAU).round() as i32
}

fn polygon_length(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|k| (poly[(k + 1) % n] - poly[k]).norm()).sum()
}

fn describe(
    curve: &PlanarCurve,
    x: &Crossing,
    wraps: bool,
    ambiguous: bool,
) -> LoopDescriptor {
    let z = curve.nodes();
    let n = z.len();
    let (i, j) = x.segments;
    let mut poly = vec![x.point];
    // loop leaves the crossing along one strand and returns along the other
    let (out_dir, in_dir) = if wraps {
        poly.extend((j + 1..n).map(|k| z[k]));
        poly.extend((0..=i).map(|k| z[k]));
        (z[(j + 1) % n] - z[j], z[(i + 1) % n] - z[i])
    } else {
        poly.extend((i + 1..=j).map(|k| z[k]));
        (z[i + 1] - z[i], z[(j + 1) % n] - z[j])
    };
    let area = shoelace_area(&poly);
    let turn = wrap_angle(out_dir.arg() - in_dir.arg());
    LoopDescriptor {
        crossing: x.point,
        segment_indices: Some((i, j)),
        diameter: point_set_diameter(&poly),
        length: polygon_length(&poly),
        winds_origin: winding_number(&poly, Point::new(0.0, 0.0)),
        exterior_angle: area.signum() * turn,
        area,
        loop_nodes: poly,
        ambiguous,
        wraps,
    }
}

/// One loop per self-crossing, using the given crossings (normally from
/// [`self_intersections`]). An embedded closed curve yields a single
/// whole-curve descriptor with zero exterior angle.
pub fn extract_loops(curve: &PlanarCurve, crossings: &[Crossing]) -> Vec<LoopDescriptor> {
    if crossings.is_empty() {
        if !curve.is_closed() {
            return Vec::new();
        }
        let z = curve.nodes().to_vec();
        return vec![LoopDescriptor {
            crossing: z[0],
            segment_indices: None,
            area: shoelace_area(&z),
            exterior_angle: 0.0,
            winds_origin: winding_number(&z, Point::new(0.0, 0.0)),
            diameter: point_set_diameter(&z),
            length: curve.length(),
            loop_nodes: z,
            ambiguous: false,
            wraps: false,
        }];
    }
    let lengths = curve.segment_lengths();
    let n = curve.len();
    crossings
        .iter()
        .map(|x| {
            let (i, j) = x.segments;
            let inner: f64 = lengths[i + 1..j].iter().sum::<f64>()
                + (1.0 - x.params.0) * lengths[i]
                + x.params.1 * lengths[j];
            let mut wraps = false;
            let mut tie = false;
            if curve.is_closed() {
                let outer = curve.length() - inner;
                wraps = outer < inner;
                tie = (outer - inner).abs() <= 1e-9 * curve.length();
            }
            let nested = crossings.iter().any(|y| {
                if y == x {
                    return false;
                }
                let inside = |k: usize| {
                    if wraps {
                        k > j || k < i
                    } else {
                        k > i && k < j
                    }
                };
                inside(y.segments.0) || inside(y.segments.1)
            });
            debug_assert!(j < n);
            describe(curve, x, wraps, tie || nested)
        })
        .collect()
}

/// Loops of a curve, computing the crossings first.
pub fn loops_of(curve: &PlanarCurve) -> Vec<LoopDescriptor> {
    extract_loops(curve, &self_intersections(curve))
}
