use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{cross, dot, wrap_angle, PlanarCurve, Point};

use super::{ProfileError, ValidationReport};

/// Shooting parameters for the expander asymptotic to the rays at polar
/// angles `opening_angle` and `pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpanderSpec {
    pub opening_angle: f64,
    #[serde(default = "default_bracket")]
    pub r0_bracket: [f64; 2],
    #[serde(default = "default_s_max")]
    pub s_max: f64,
    /// Bisection stops once the outgoing angle is within this of `pi`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Node spacing of the output.
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    /// RK4 steps per output node.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
}

fn default_bracket() -> [f64; 2] {
    [0.02, 3.0]
}
fn default_s_max() -> f64 {
    16.0
}
fn default_tolerance() -> f64 {
    1e-12
}
fn default_spacing() -> f64 {
    0.02
}
fn default_substeps() -> usize {
    8
}

impl ExpanderSpec {
    pub fn new(opening_angle: f64) -> Self {
        ExpanderSpec {
            opening_angle,
            r0_bracket: default_bracket(),
            s_max: default_s_max(),
            tolerance: default_tolerance(),
            spacing: default_spacing(),
            substeps: default_substeps(),
        }
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let t = self.opening_angle;
        if !(t > PI / 2.0 && t <= PI) {
            return Err(ProfileError::InvalidSpec(format!(
                "opening angle {t} outside (pi/2, pi]"
            )));
        }
        let [a, b] = self.r0_bracket;
        if !(a > 0.0 && b > a && self.s_max > b && self.spacing > 0.0 && self.substeps > 0 && self.tolerance > 0.0) {
            return Err(ProfileError::InvalidSpec(format!("bad shooting parameters {self:?}")));
        }
        Ok(())
    }
}

/// Pointwise residual statistics of the expander equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max: f64,
    /// `sqrt(sum r^2 ds)`.
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderProfile {
    pub curve: PlanarCurve,
    /// Bisector radius found by the shooting.
    pub r0: f64,
    /// Polar angles of the two far ends, start then end.
    pub asymptote_angles: (f64, f64),
    pub residual: Residual,
    pub report: ValidationReport,
}

/// `(z, phi)' = (e^{i phi}, <z, nu> (1/2 + 1/|z|^2))` with `nu = i e^{i phi}`.
fn rhs(z: Point, phi: f64) -> (Point, f64) {
    let t = Point::from_polar(1.0, phi);
    let nu = Point::new(-t.im, t.re);
    (t, dot(z, nu) * (0.5 + 1.0 / z.norm_sqr()))
}

fn rk4(z: Point, phi: f64, ds: f64) -> (Point, f64) {
    let (a1, b1) = rhs(z, phi);
    let (a2, b2) = rhs(z + a1 * (ds / 2.0), phi + b1 * ds / 2.0);
    let (a3, b3) = rhs(z + a2 * (ds / 2.0), phi + b2 * ds / 2.0);
    let (a4, b4) = rhs(z + a3 * ds, phi + b3 * ds);
    (
        z + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (ds / 6.0),
        phi + (b1 + 2.0 * b2 + 2.0 * b3 + b4) * ds / 6.0,
    )
}

/// Half curve from the bisector point `r0 e^{ib}` leaving towards the ray at
/// `pi`, one node per `spacing`.
fn shoot(spec: &ExpanderSpec, r0: f64) -> Vec<Point> {
    let b = (spec.opening_angle + PI) / 2.0;
    let nodes_out = (spec.s_max / spec.spacing).round() as usize;
    let ds = spec.spacing / spec.substeps as f64;
    let mut z = Point::from_polar(r0, b);
    let mut phi = b + PI / 2.0;
    let mut out = Vec::with_capacity(nodes_out + 1);
    out.push(z);
    for _ in 0..nodes_out {
        for _ in 0..spec.substeps {
            (z, phi) = rk4(z, phi, ds);
        }
        out.push(z);
    }
    out
}

/// Signed polar angle of the far end measured from `pi`.
fn miss(spec: &ExpanderSpec, r0: f64) -> f64 {
    let end = *shoot(spec, r0).last().unwrap();
    if !(end.re.is_finite() && end.im.is_finite()) {
        return f64::NAN;
    }
    wrap_angle(end.arg() - PI)
}

/// Expander by shooting from the bisector of the rays at `opening_angle`
/// and `pi`, bisecting on the bisector radius and mirroring the half found.
///
/// Opening angle `pi` degenerates to the real axis.
pub fn expander_profile(spec: &ExpanderSpec) -> Result<ExpanderProfile, ProfileError> {
    spec.validate()?;
    let n = (spec.s_max / spec.spacing).round() as usize;
    if spec.opening_angle == PI {
        let nodes = (0..=2 * n)
            .map(|k| Point::new(spec.spacing * (k as f64 - n as f64), 0.0))
            .collect();
        return finish(spec, PlanarCurve::open(nodes)?, 0.0);
    }
    let [mut lo, mut hi] = spec.r0_bracket;
    let (mut f_lo, f_hi) = (miss(spec, lo), miss(spec, hi));
    if !(f_lo * f_hi < 0.0) {
        let trace = (0..=8)
            .map(|k| {
                let r = lo + (hi - lo) * k as f64 / 8.0;
                (r, miss(spec, r))
            })
            .collect();
        return Err(ProfileError::ShootingBracket { trace });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = miss(spec, mid);
        if f.abs() < spec.tolerance || hi - lo < 1e-15 * hi {
            lo = mid;
            hi = mid;
            break;
        }
        if (f < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    let r0 = 0.5 * (lo + hi);
    let half = shoot(spec, r0);
    let rot = Point::from_polar(1.0, spec.opening_angle + PI);
    let mut nodes: Vec<Point> = half.iter().rev().map(|z| rot * z.conj()).collect();
    nodes.extend_from_slice(&half[1..]);
    finish(spec, PlanarCurve::open(nodes)?, r0)
}

fn finish(spec: &ExpanderSpec, curve: PlanarCurve, r0: f64) -> Result<ExpanderProfile, ProfileError> {
    let z = curve.nodes();
    let asymptote_angles = (z[0].arg().rem_euclid(2.0 * PI), z[z.len() - 1].arg().rem_euclid(2.0 * PI));
    let residual = expander_residual(&curve);
    let mut report = ValidationReport::default();
    report.below("max_residual", residual.max, 1e-6);
    report.below(
        "start_asymptote_error",
        wrap_angle(asymptote_angles.0 - spec.opening_angle).abs(),
        1e-3,
    );
    report.below("end_asymptote_error", wrap_angle(asymptote_angles.1 - PI).abs(), 1e-3);
    Ok(ExpanderProfile {
        curve,
        r0,
        asymptote_angles,
        residual,
        report,
    })
}

/// Residual of `k = <x, nu> (1/2 + 1/|x|^2)` with `nu` the left normal and
/// `k` signed against it, from five-point differences in the node index.
///
/// Open curves skip their two end nodes on each side; a curve starting at
/// the origin uses odd ghost nodes there, where the right side tends to `k/2`.
pub fn expander_residual(curve: &PlanarCurve) -> Residual {
    let z = curve.nodes();
    let n = z.len();
    let closed = curve.is_closed();
    let origin = curve.starts_at_origin();
    let at = |k: i64| -> Option<Point> {
        if closed {
            Some(z[k.rem_euclid(n as i64) as usize])
        } else if k < 0 && origin && (-k as usize) < n {
            Some(-z[(-k) as usize])
        } else if k >= 0 && (k as usize) < n {
            Some(z[k as usize])
        } else {
            None
        }
    };
    let lengths = curve.segment_lengths();
    let mut max = 0.0f64;
    let mut sum = 0.0;
    for i in 0..n {
        let k = i as i64;
        let (Some(m2), Some(m1), Some(p1), Some(p2)) = (at(k - 2), at(k - 1), at(k + 1), at(k + 2)) else {
            continue;
        };
        let c = z[i];
        let d1 = (m2 - m1 * 8.0 + p1 * 8.0 - p2) / 12.0;
        let d2 = (-m2 + m1 * 16.0 - c * 30.0 + p1 * 16.0 - p2) / 12.0;
        let speed = d1.norm();
        let kappa = cross(d1, d2) / (speed * speed * speed);
        let r = if c.norm_sqr() == 0.0 {
            kappa / 2.0
        } else {
            let nu = Point::new(-d1.im, d1.re) / speed;
            kappa - dot(c, nu) * (0.5 + 1.0 / c.norm_sqr())
        };
        max = max.max(r.abs());
        let ds = match (i.checked_sub(1), i < lengths.len()) {
            (Some(p), true) => 0.5 * (lengths[p] + lengths[i]),
            (Some(p), false) => 0.5 * lengths[p],
            (None, _) => 0.5 * lengths[i],
        };
        sum += r * r * ds;
    }
    Residual { max, l2: sum.sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::testing::circle;

    #[test]
    fn opening_pi_is_the_real_axis() {
        let p = expander_profile(&ExpanderSpec::new(PI)).unwrap();
        assert!(p.curve.nodes().iter().all(|z| z.im == 0.0));
        assert_eq!(p.residual.max, 0.0);
    }

    #[test]
    fn unit_circle_residual() {
        let r = expander_residual(&circle(Point::new(0.0, 0.0), 1.0, 400));
        assert!((r.max - 2.5).abs() < 1e-4, "{}", r.max);
    }

    #[test]
    fn residual_vanishes_on_a_line_through_the_origin() {
        let nodes = (0..=40).map(|k| Point::from_polar(k as f64 * 0.1 - 2.0, 0.4)).collect();
        assert!(expander_residual(&PlanarCurve::open(nodes).unwrap()).max < 1e-12);
    }

    #[test]
    fn solves_point_six_pi() {
        let p = expander_profile(&ExpanderSpec::new(0.6 * PI)).unwrap();
        assert!(p.report.passed(), "{:?}", p.report);
        // mirror symmetry across the bisector
        let rot = Point::from_polar(1.0, 1.6 * PI);
        let z = p.curve.nodes();
        let n = z.len();
        for k in 0..n {
            assert!((rot * z[k].conj() - z[n - 1 - k]).norm() < 1e-8);
        }
    }

    #[test]
    fn narrow_bracket_reports_trace() {
        let mut spec = ExpanderSpec::new(0.6 * PI);
        spec.r0_bracket = [2.0, 3.0];
        match expander_profile(&spec) {
            Err(ProfileError::ShootingBracket { trace }) => assert_eq!(trace.len(), 9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_acute_opening() {
        assert!(matches!(
            expander_profile(&ExpanderSpec::new(PI / 4.0)),
            Err(ProfileError::InvalidSpec(_))
        ));
    }
}
