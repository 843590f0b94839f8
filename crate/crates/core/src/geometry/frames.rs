use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{GeometryError, PlanarCurve, Point};

/// Discrete Frenet data at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub tangent: Point,
    /// Tangent rotated by +pi/2.
    pub normal: Point,
    /// Curvature vector `(center - z) / R^2` of the circle through the node
    /// and its two neighbours; zero for collinear triples.
    pub curvature: Point,
}

impl Frame {
    /// Signed curvature with respect to `normal`.
    pub fn signed_curvature(&self) -> f64 {
        dot(self.curvature, self.normal)
    }
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a.re * b.re + a.im * b.im
}

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Curvature vector at `b` of the circle through `a, b, c`.
///
/// Written as `q D / |q|^2` (with `p = q / D` the circumcenter offset) so that
/// collinear triples give exactly zero instead of dividing by zero.
pub fn circumcircle_curvature(a: Point, b: Point, c: Point) -> Point {
    let u = a - b;
    let w = c - b;
    let d = 2.0 * cross(u, w);
    let uu = u.norm_sqr();
    let ww = w.norm_sqr();
    let q = Point::new(w.im * uu - u.im * ww, u.re * ww - w.re * uu);
    let qq = q.norm_sqr();
    if qq == 0.0 || d == 0.0 {
        return Point::new(0.0, 0.0);
    }
    q * (d / qq)
}

/// Neighbour lookup with the stencil conventions of the crate: wrap-around on
/// closed curves, odd ghost node `-z_1` before an origin start, and `None` at
/// other open ends.
pub(crate) fn neighbours(curve: &PlanarCurve, i: usize) -> (Option<Point>, Option<Point>) {
    let z = curve.nodes();
    let n = z.len();
    if curve.is_closed() {
        return (Some(z[(i + n - 1) % n]), Some(z[(i + 1) % n]));
    }
    let prev = if i > 0 {
        Some(z[i - 1])
    } else if curve.starts_at_origin() {
        Some(-z[1])
    } else {
        None
    };
    let next = if i + 1 < n { Some(z[i + 1]) } else { None };
    (prev, next)
}

/// Per-node tangent, normal and curvature vector.
///
/// Interior tangents are normalised central differences; open ends without a
/// ghost use the adjacent segment and the circle through the three end nodes.
pub fn frames(curve: &PlanarCurve) -> Vec<Frame> {
    let z = curve.nodes();
    let n = z.len();
    (0..n)
        .map(|i| {
            let (prev, next) = neighbours(curve, i);
            let (tangent, curvature) = match (prev, next) {
                (Some(p), Some(q)) => (q - p, circumcircle_curvature(p, z[i], q)),
                (None, Some(q)) => {
                    let k = circumcircle_curvature(z[i], q, z[i + 2]);
                    // curvature of the end circle, carried back to the end node
                    let center_offset = if k.norm_sqr() > 0.0 { k / k.norm_sqr() } else { k };
                    let at_end = if k.norm_sqr() > 0.0 {
                        let center = q + center_offset;
                        let r2 = (center - z[i]).norm_sqr();
                        (center - z[i]) / r2
                    } else {
                        k
                    };
                    (q - z[i], at_end)
                }
                (Some(p), None) => {
                    let k = circumcircle_curvature(z[i - 2], p, z[i]);
                    let at_end = if k.norm_sqr() > 0.0 {
                        let center = p + k / k.norm_sqr();
                        let r2 = (center - z[i]).norm_sqr();
                        (center - z[i]) / r2
                    } else {
                        k
                    };
                    (z[i] - p, at_end)
                }
                (None, None) => unreachable!("curves have at least three nodes"),
            };
            let t = tangent / tangent.norm();
            Frame {
                tangent: t,
                normal: Point::new(-t.im, t.re),
                curvature,
            }
        })
        .collect()
}

/// Continuous lift of `arg(z z')` per node.
///
/// At an origin start the value is the limit `2 arg T(0)`. The lift is shifted
/// so the first node away from the origin has its value in `(-pi, pi]`.
pub fn lagrangian_angle(curve: &PlanarCurve) -> Result<Vec<f64>, GeometryError> {
    let z = curve.nodes();
    let fr = frames(curve);
    let scale = curve.bbox_diameter();
    let mut raw = Vec::with_capacity(z.len());
    for (i, (p, f)) in z.iter().zip(&fr).enumerate() {
        if p.norm() <= 1e-12 * scale {
            if i == 0 && curve.starts_at_origin() {
                raw.push(2.0 * f.tangent.arg());
                continue;
            }
            return Err(GeometryError::SingularAngle(i));
        }
        raw.push((p * f.tangent).arg());
    }
    let mut lifted = unwrap(&raw);
    let anchor = z.iter().position(|p| p.norm() > 0.0).unwrap_or(0);
    let shift = lifted[anchor] - wrap_angle(lifted[anchor]);
    for v in &mut lifted {
        *v -= shift;
    }
    Ok(lifted)
}

/// Removes `2 pi` jumps from a sequence of angles.
pub fn unwrap(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut acc = 0.0;
    for (i, &a) in raw.iter().enumerate() {
        if i == 0 {
            acc = a;
        } else {
            acc += wrap_angle(a - raw[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Continuous lift of the tangent direction, one value per segment.
pub fn tangent_angle_lift(curve: &PlanarCurve) -> Vec<f64> {
    let raw: Vec<f64> = (0..curve.segment_count())
        .map(|i| {
            let (a, b) = curve.segment(i);
            (b - a).arg()
        })
        .collect();
    unwrap(&raw)
}

/// Total turning of the tangent divided by `2 pi`. Integral for closed curves.
pub fn rotation_index(curve: &PlanarCurve) -> f64 {
    let lift = tangent_angle_lift(curve);
    let mut total = lift[lift.len() - 1] - lift[0];
    if curve.is_closed() {
        total += wrap_angle(lift[0] - lift[lift.len() - 1]);
    }
    total / TAU
}

/// `beta(s) = int_0^s Im(conj(z) z') ds'` with `beta(0) = 0`.
///
/// The trapezoid rule is exact on straight segments, where the integrand is
/// linear: each segment contributes `cross(z_k, z_{k+1})`.
pub fn liouville_primitive(curve: &PlanarCurve) -> Vec<f64> {
    let z = curve.nodes();
    let mut out = Vec::with_capacity(z.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in z.windows(2) {
        acc += cross(w[0], w[1]);
        out.push(acc);
    }
    out
}

/// Smallest `C` with `|beta| <= C (|z|^2 + 1)` at every node.
pub fn quadratic_growth_constant(curve: &PlanarCurve, beta: &[f64]) -> f64 {
    curve
        .nodes()
        .iter()
        .zip(beta)
        .map(|(p, b)| b.abs() / (p.norm_sqr() + 1.0))
        .fold(0.0, f64::max)
}

/// Weighted length `int |z| |dz|`; the represented surface has area
/// `2 pi` times this.
pub fn h_length(curve: &PlanarCurve) -> f64 {
    (0..curve.segment_count())
        .map(|i| {
            let (a, b) = curve.segment(i);
            0.5 * (a.norm() + b.norm()) * (b - a).norm()
        })
        .sum()
}

/// Normal component of the position, `z - <z,T> T`.
pub fn normal_part(z: Point, tangent: Point) -> Point {
    z - tangent * dot(z, tangent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::testing::{circle, ray};

    #[test]
    fn circle_curvature_points_at_center() {
        let r = 2.5;
        let c = circle(Point::new(0.3, -1.0), r, 256);
        for (p, f) in c.nodes().iter().zip(frames(&c)) {
            let k = f.curvature;
            assert!((k.norm() * r - 1.0).abs() < 1e-3);
            let to_center = (Point::new(0.3, -1.0) - p) / r;
            assert!((k * r - to_center).norm() < 1e-3);
        }
    }

    #[test]
    fn ray_is_flat() {
        let c = ray(0.7, 10.0, 0.5);
        assert!(frames(&c).iter().all(|f| f.curvature.norm() < 1e-12));
    }

    #[test]
    fn parabola_vertex_curvature() {
        let nodes: Vec<Point> = (-50..=50)
            .map(|k| {
                let x = k as f64 * 0.02;
                Point::new(x, x * x / 2.0)
            })
            .collect();
        let c = PlanarCurve::open(nodes).unwrap();
        let f = frames(&c)[50];
        assert!((f.signed_curvature() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn lagrangian_angle_of_ray_and_circle() {
        let phi = 0.4;
        let theta = lagrangian_angle(&ray(phi, 5.0, 0.25)).unwrap();
        assert!(theta.iter().all(|t| (t - 2.0 * phi).abs() < 1e-12));

        let n = 256;
        let c = circle(Point::new(0.0, 0.0), 1.0, n);
        let theta = lagrangian_angle(&c).unwrap();
        for (k, t) in theta.iter().enumerate() {
            let s = TAU * k as f64 / n as f64;
            assert!((t - (2.0 * s + PI / 2.0)).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn interior_origin_is_singular() {
        let c = PlanarCurve::open(vec![
            Point::new(-1.0, 0.0),
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.5),
        ])
        .unwrap();
        assert!(matches!(lagrangian_angle(&c), Err(GeometryError::SingularAngle(1))));
    }

    #[test]
    fn liouville_on_ray_and_circle() {
        assert!(liouville_primitive(&ray(2.0, 4.0, 0.1)).iter().all(|b| b.abs() < 1e-12));
        let r = 1.5;
        let n = 256;
        let c = circle(Point::new(0.0, 0.0), r, n);
        let beta = liouville_primitive(&c);
        let h = TAU / n as f64;
        for (k, b) in beta.iter().enumerate() {
            let s = r * h * k as f64;
            // inscribed polygon: each chord contributes r^2 sin(h) instead of r^2 h
            assert!((b - r * s).abs() <= 2e-4 * r * s + 1e-14, "k={k}");
        }
        assert!(quadratic_growth_constant(&c, &beta) > 0.0);
    }

    #[test]
    fn rotation_indices() {
        let c = circle(Point::new(0.0, 0.0), 1.0, 64);
        assert!((rotation_index(&c) - 1.0).abs() < 1e-12);
        assert!((rotation_index(&c.reversed()) + 1.0).abs() < 1e-12);
        let eight: Vec<Point> = (0..200)
            .map(|k| {
                let t = TAU * k as f64 / 200.0;
                Point::new(t.sin(), t.sin() * t.cos())
            })
            .collect();
        let eight = PlanarCurve::closed(eight).unwrap();
        assert!(rotation_index(&eight).abs() < 1e-12);
    }

    #[test]
    fn h_length_closed_forms() {
        let r_max = 3.0;
        assert!((h_length(&ray(1.1, r_max, 0.1)) - r_max * r_max / 2.0).abs() < 1e-12);
        let r = 0.7;
        let c = circle(Point::new(0.0, 0.0), r, 512);
        assert!((h_length(&c) / (TAU * r * r) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
    }
}
