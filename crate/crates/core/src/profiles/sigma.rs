use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::geometry::{
    cone_violations, extract_loops, self_intersections, shoelace_area, EquivariantProfile, PlanarCurve, Point,
};

use super::{ProfileError, ValidationReport};

/// The singular-scenario curve: a profile from the origin with one loop,
/// inside the cone `pi/2 + 2a < arg z < pi + a`, straight along the negative
/// real axis far out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaSpec {
    pub loop_area: f64,
    #[serde(default = "default_cone")]
    pub cone_param: f64,
    /// Radius of the far end.
    #[serde(default = "default_extent")]
    pub extent: f64,
    pub spacing: f64,
}

fn default_cone() -> f64 {
    0.05
}
fn default_extent() -> f64 {
    30.0
}

impl SigmaSpec {
    pub fn new(loop_area: f64, spacing: f64) -> Self {
        SigmaSpec {
            loop_area,
            cone_param: default_cone(),
            extent: default_extent(),
            spacing,
        }
    }
}

impl SigmaSpec {
    /// Parameter checks that need no curve.
    pub fn validate(&self) -> Result<(), ProfileError> {
        let a = self.cone_param;
        if !(self.loop_area > 0.0 && self.spacing > 0.0 && self.extent > 0.0 && a >= 0.0) {
            return Err(ProfileError::InvalidSpec(format!(
                "need positive loop_area, spacing, extent and cone_param >= 0, got {self:?}"
            )));
        }
        let room = FRAC_PI_2 - 2.0 * a;
        if room < 0.3 {
            return Err(ProfileError::Infeasible {
                what: "angular room pi/2 - 2a >= 0.3 for the loop".into(),
                measured: room,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaProfile {
    pub profile: EquivariantProfile,
    /// Scale applied to the unit-size shape.
    pub scale: f64,
    pub report: ValidationReport,
}

// Log-polar shape: the loop is a reversal of log r against a dip in angle.
const BUMP: f64 = 2.5;
const WIDTH: f64 = 0.5;
// angle turns from its inner value to pi over this log-radius window
const TURN: (f64, f64) = (0.75, 1.55);

/// Odd bump, zero with two derivatives at `|v| = pi`.
fn bump(v: f64) -> f64 {
    if v.abs() >= PI {
        0.0
    } else {
        v.sin() * (1.0 + v.cos()) / 2.0
    }
}

fn dip(v: f64) -> f64 {
    if v.abs() >= PI {
        0.0
    } else {
        ((1.0 + v.cos()) / 2.0).powi(2)
    }
}

fn smootherstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

#[derive(Debug, Clone, Copy)]
struct Shape {
    inner_angle: f64,
    depth: f64,
}

impl Shape {
    /// Angles stay within `[pi - 0.9 room, pi]` where `room = pi/2 - 2a`.
    fn for_cone(a: f64) -> Self {
        let room = FRAC_PI_2 - 2.0 * a;
        Shape {
            inner_angle: PI - 0.3 * room,
            depth: 0.6 * room,
        }
    }

    /// Unit-scale point at log-radius parameter `u`.
    fn at(&self, u: f64) -> Point {
        let v = u / WIDTH;
        let rho = u - BUMP * WIDTH * bump(v);
        let phi = self.inner_angle + (PI - self.inner_angle) * smootherstep((u - TURN.0) / (TURN.1 - TURN.0))
            - self.depth * dip(v);
        Point::from_polar(rho.exp(), phi)
    }

    /// Parameter half-width of the loop: the root of `v = BUMP * bump(v)`.
    fn crossing_v() -> f64 {
        let (mut lo, mut hi) = (0.5, 2.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid - BUMP * bump(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Signed area and length of the unit-scale loop.
    fn unit_loop(&self) -> (f64, f64) {
        let v = Self::crossing_v();
        let m = 20_000;
        let pts: Vec<Point> = (0..=m)
            .map(|k| self.at(WIDTH * v * (2.0 * k as f64 / m as f64 - 1.0)))
            .collect();
        let len = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        (shoelace_area(&pts[..m]), len)
    }
}

// below this log-radius parameter the curve is the straight inner ray
const U_RAY: f64 = -PI * WIDTH - 0.1;
// above this it is the straight negative real axis
const U_FAR: f64 = PI * WIDTH;

/// Builds the curve at uniform spacing and runs its validation report.
pub fn sigma_curve(spec: &SigmaSpec) -> Result<SigmaProfile, ProfileError> {
    spec.validate()?;
    let a = spec.cone_param;
    let shape = Shape::for_cone(a);
    let (unit_area, unit_len) = shape.unit_loop();
    let scale = (spec.loop_area / unit_area.abs()).sqrt();
    let straight_from = scale * U_FAR.max(TURN.1).exp();
    if straight_from > 0.6 * spec.extent {
        return Err(ProfileError::Infeasible {
            what: "far field straight beyond 0.6 extent".into(),
            measured: straight_from / spec.extent,
        });
    }
    if scale * unit_len < 16.0 * spec.spacing {
        return Err(ProfileError::Infeasible {
            what: "loop length of at least 16 spacings".into(),
            measured: scale * unit_len / spec.spacing,
        });
    }

    let u_end = (spec.extent / scale).ln();
    let m = 200_000.max((50.0 * spec.extent / spec.spacing) as usize);
    let du = (u_end - U_RAY) / m as f64;
    let ray_len = scale * U_RAY.exp();
    let mut table = Vec::with_capacity(m + 1);
    table.push(ray_len);
    let mut prev = shape.at(U_RAY) * scale;
    for k in 1..=m {
        let p = shape.at(U_RAY + du * k as f64) * scale;
        table.push(table[k - 1] + (p - prev).norm());
        prev = p;
    }
    let total = table[m];
    let segs = (total / spec.spacing).round() as usize;
    let dir = Point::from_polar(1.0, shape.inner_angle);
    let mut nodes = Vec::with_capacity(segs + 1);
    let mut cell = 0usize;
    for j in 0..=segs {
        let s = total * j as f64 / segs as f64;
        if s <= ray_len {
            nodes.push(dir * s);
            continue;
        }
        while cell + 1 < m && table[cell + 1] < s {
            cell += 1;
        }
        let frac = ((s - table[cell]) / (table[cell + 1] - table[cell])).clamp(0.0, 1.0);
        let u = if j == segs { u_end } else { U_RAY + du * (cell as f64 + frac) };
        nodes.push(shape.at(u) * scale);
    }
    *nodes.last_mut().unwrap() = Point::new(-spec.extent, 0.0);
    let profile = EquivariantProfile::new(PlanarCurve::open(nodes)?, PI)?.with_cone(a);
    let report = validate_sigma(&profile.curve, spec);
    Ok(SigmaProfile { profile, scale, report })
}

/// Crossing count, cone containment, far-field slope, loop area and loop
/// winding, as a pure function of the curve.
pub fn validate_sigma(curve: &PlanarCurve, spec: &SigmaSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let crossings = self_intersections(curve);
    report.equals("crossings", crossings.len() as f64, 1.0);
    report.equals("cone_violations", cone_violations(curve, spec.cone_param) as f64, 0.0);
    let far: Vec<Point> = curve
        .nodes()
        .iter()
        .copied()
        .filter(|p| p.norm() >= 0.6 * spec.extent)
        .collect();
    let slope = far
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            (d.im / d.re).abs()
        })
        .fold(0.0, f64::max);
    report.below("far_field_slope", slope, 1e-2);
    let loops = extract_loops(curve, &crossings);
    let (area_err, winds) = match loops.first() {
        Some(d) => ((d.area.abs() / spec.loop_area - 1.0).abs(), d.winds_origin as f64),
        None => (f64::INFINITY, f64::NAN),
    };
    report.below("loop_area_error", area_err, 0.02);
    report.equals("loop_winds_origin", winds, 0.0);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sigma_passes_its_report() {
        let s = sigma_curve(&SigmaSpec::new(PI, 0.05)).unwrap();
        assert!(s.report.passed(), "{:?}", s.report.failures());
        assert_eq!(s.profile.curve.nodes()[0], Point::new(0.0, 0.0));
        assert!(s.profile.origin_smoothness_defect() < 1e-12);
        let spacings = s.profile.curve.segment_lengths();
        assert!(spacings.iter().all(|l| (l / 0.05 - 1.0).abs() < 0.02));
    }

    #[test]
    fn loop_is_clockwise_and_off_origin() {
        let s = sigma_curve(&SigmaSpec::new(PI, 0.05)).unwrap();
        let c = &s.profile.curve;
        let d = &extract_loops(c, &self_intersections(c))[0];
        assert!(d.area < 0.0);
        assert_eq!(d.winds_origin, 0);
        assert!(d.crossing.norm() > 1.0);
    }

    #[test]
    fn area_scales_over_a_decade() {
        for a1 in [0.3, 1.0, 3.0] {
            let s = sigma_curve(&SigmaSpec::new(a1, 0.02)).unwrap();
            assert!(s.report.get("loop_area_error").unwrap().passed, "{a1}: {:?}", s.report);
        }
    }

    #[test]
    fn wider_cone_parameter_still_fits() {
        let mut spec = SigmaSpec::new(1.0, 0.05);
        spec.cone_param = 0.3;
        let s = sigma_curve(&spec).unwrap();
        assert!(s.report.passed(), "{:?}", s.report.failures());
    }

    #[test]
    fn oversized_loop_is_infeasible() {
        assert!(matches!(
            sigma_curve(&SigmaSpec::new(200.0, 0.05)),
            Err(ProfileError::Infeasible { .. })
        ));
        let mut spec = SigmaSpec::new(PI, 0.05);
        spec.cone_param = 0.7;
        assert!(matches!(sigma_curve(&spec), Err(ProfileError::Infeasible { .. })));
    }
}
