use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::geometry::{lagrangian_angle, self_intersections, EquivariantProfile, PlanarCurve, Point};

use super::{ProfileError, ValidationReport};

/// Three-ray curve with a small neck: out along the ray at `theta3`, round a
/// turning arc, back in along `theta2`, across to the positive real axis at
/// scale `eps`, then out along the real axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhitneySpec {
    pub eps: f64,
    #[serde(default = "one")]
    pub outer_scale: f64,
    pub theta2: f64,
    pub theta3: f64,
    /// Neck vertex radius over `eps`.
    #[serde(default = "default_neck")]
    pub neck_ratio: f64,
    /// Radius over `eps` where the neck has joined the rays.
    #[serde(default = "default_blend")]
    pub blend_ratio: f64,
    /// Inner and outer radius of the turning arc, inside `(1, 3)`.
    #[serde(default = "default_turn")]
    pub turn_radii: [f64; 2],
    /// Far end radius over `outer_scale`.
    #[serde(default = "default_extent")]
    pub extent: f64,
    pub spacing: f64,
}

fn one() -> f64 {
    1.0
}
fn default_neck() -> f64 {
    1.0 / 6.0
}
fn default_blend() -> f64 {
    0.8
}
fn default_turn() -> [f64; 2] {
    [1.2, 2.5]
}
fn default_extent() -> f64 {
    5.0
}

impl WhitneySpec {
    pub fn new(eps: f64, theta2: f64, theta3: f64, spacing: f64) -> Self {
        WhitneySpec {
            eps,
            outer_scale: 1.0,
            theta2,
            theta3,
            neck_ratio: default_neck(),
            blend_ratio: default_blend(),
            turn_radii: default_turn(),
            extent: default_extent(),
            spacing,
        }
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let bad = |m: String| Err(ProfileError::InvalidSpec(m));
        if !(FRAC_PI_2 < self.theta2 && self.theta2 < self.theta3 && self.theta3 < PI) {
            return bad(format!(
                "need pi/2 < theta2 < theta3 < pi, got {} and {}",
                self.theta2, self.theta3
            ));
        }
        if !(self.eps > 0.0 && self.eps < 0.5 * self.outer_scale) {
            return bad(format!("need 0 < eps < outer_scale/2, got {}", self.eps));
        }
        if !(0.0 < self.neck_ratio && self.neck_ratio < 0.5 * self.blend_ratio && self.blend_ratio < 1.0) {
            return bad("need 0 < neck_ratio < blend_ratio/2 < 1/2".into());
        }
        let [a, b] = self.turn_radii;
        if !(1.0 < a && a < b && b < 3.0 && self.extent > 3.0) {
            return bad("need 1 < turn radii < 3 < extent".into());
        }
        if !(self.spacing > 0.0 && self.spacing < 0.5 * self.neck_ratio * self.eps) {
            return bad(format!(
                "spacing {} does not resolve the neck radius {}",
                self.spacing,
                self.neck_ratio * self.eps
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCurve {
    pub profile: EquivariantProfile,
    /// Nodes of the inner piece joining the `theta2` ray to the real axis.
    pub gamma1: Range<usize>,
    pub report: ValidationReport,
}

fn smootherstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

/// Samples a chain of pieces, each a map of `[0, 1]`, at uniform arclength.
fn sample_chain(pieces: &[Box<dyn Fn(f64) -> Point + '_>], spacing: f64) -> Vec<Point> {
    const DENSE: usize = 20_000;
    let mut params: Vec<(usize, f64)> = Vec::new();
    let mut table: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    for (i, f) in pieces.iter().enumerate() {
        let mut prev = f(0.0);
        if i == 0 {
            params.push((0, 0.0));
            table.push(0.0);
        }
        for k in 1..=DENSE {
            let t = k as f64 / DENSE as f64;
            let p = f(t);
            acc += (p - prev).norm();
            prev = p;
            params.push((i, t));
            table.push(acc);
        }
    }
    let segs = (acc / spacing).round() as usize;
    let mut out = Vec::with_capacity(segs + 1);
    let mut cell = 0usize;
    for j in 0..=segs {
        let s = acc * j as f64 / segs as f64;
        while cell + 2 < table.len() && table[cell + 1] < s {
            cell += 1;
        }
        let (i0, t0) = params[cell];
        let (i1, t1) = params[cell + 1];
        let frac = ((s - table[cell]) / (table[cell + 1] - table[cell])).clamp(0.0, 1.0);
        let p = if i0 == i1 {
            pieces[i0](t0 + frac * (t1 - t0))
        } else {
            pieces[i1](frac * t1)
        };
        out.push(p);
    }
    *out.last_mut().unwrap() = pieces[pieces.len() - 1](1.0);
    out
}

/// Builds the curve at unit outer scale with `eps / outer_scale`, scales it
/// by `outer_scale` and validates every defining property.
pub fn whitney_curve(spec: &WhitneySpec) -> Result<WhitneyCurve, ProfileError> {
    spec.validate()?;
    let big = spec.outer_scale;
    let e = spec.eps / big;
    let (t2, t3) = (spec.theta2, spec.theta3);
    let [r_in, r_out] = spec.turn_radii;
    let stretch = (r_out / r_in).ln();
    let k = PI / t2;
    let neck_w = (spec.neck_ratio * e).powf(k);
    let blend_w = (spec.blend_ratio * e).powf(k);
    let r_blend = spec.blend_ratio * e;

    let pieces: Vec<Box<dyn Fn(f64) -> Point>> = vec![
        Box::new(move |t| Point::from_polar(r_in * t, t3)),
        Box::new(move |t| {
            Point::from_polar(
                r_in * (stretch * (PI * t).sin()).exp(),
                t3 - (t3 - t2) * smootherstep(t),
            )
        }),
        Box::new(move |t| Point::from_polar(r_in + (r_blend - r_in) * t, t2)),
        // the line Im w = neck_w in the plane of w = z^k, flattened onto the
        // real axis near its ends
        Box::new(move |t| {
            let x = blend_w * (2.0 * t - 1.0);
            let g = 1.0 - smootherstep((x.abs() / blend_w - 1.0 / 3.0) * 1.5);
            let w = Point::new(x, neck_w * g);
            Point::from_polar(w.norm().powf(1.0 / k), w.im.atan2(w.re) / k)
        }),
        Box::new(move |t| Point::from_polar(r_blend + (spec.extent - r_blend) * t, 0.0)),
    ];
    let mut nodes = sample_chain(&pieces, spec.spacing / big);
    for p in nodes.iter_mut() {
        *p *= big;
    }
    nodes[0] = Point::new(0.0, 0.0);
    let curve = PlanarCurve::open(nodes)?;
    let (report, gamma1) = validate_whitney(&curve, spec);
    if let Some(c) = report.get("gamma1_theta_oscillation") {
        if !c.passed {
            return Err(ProfileError::Infeasible {
                what: "Lagrangian angle oscillation on the inner piece below pi/2".into(),
                measured: c.value,
            });
        }
    }
    Ok(WhitneyCurve {
        profile: EquivariantProfile::new(curve, 0.0)?,
        gamma1,
        report,
    })
}

/// Checks, on the scaled curve: upper half plane, single origin node,
/// real axis beyond `3 R`, the three rays on `A(eps, R)`, two pieces inside
/// `B_R` and the angle oscillation on the inner piece.
pub fn validate_whitney(curve: &PlanarCurve, spec: &WhitneySpec) -> (ValidationReport, Range<usize>) {
    let big = spec.outer_scale;
    let z = curve.nodes();
    let mut report = ValidationReport::default();
    report.equals(
        "lower_half_plane_nodes",
        z.iter().filter(|p| p.im < -1e-12 * big).count() as f64,
        0.0,
    );
    report.equals(
        "origin_nodes_after_start",
        z[1..].iter().filter(|p| p.norm() == 0.0).count() as f64,
        0.0,
    );
    let far = z
        .iter()
        .filter(|p| p.norm() > 3.0 * big)
        .map(|p| if p.re > 0.0 { p.im.abs() } else { f64::INFINITY })
        .fold(0.0, f64::max);
    report.below("far_field_off_real_axis", far / big, 1e-9);
    let rays = [0.0, spec.theta2, spec.theta3];
    let annulus = z
        .iter()
        .filter(|p| p.norm() > spec.eps && p.norm() < big)
        .map(|p| rays.iter().map(|a| (p.arg() - a).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    report.below("annulus_off_rays", annulus, 1e-9);

    let mut runs: Vec<Range<usize>> = Vec::new();
    for (i, p) in z.iter().enumerate() {
        if p.norm() < big {
            match runs.last_mut() {
                Some(r) if r.end == i => r.end = i + 1,
                _ => runs.push(i..i + 1),
            }
        }
    }
    report.equals("inner_pieces", runs.len() as f64, 2.0);
    let gamma1 = runs.iter().find(|r| r.start > 0).cloned().unwrap_or(0..0);
    let osc = match lagrangian_angle(curve) {
        Ok(theta) if !gamma1.is_empty() => {
            let piece = &theta[gamma1.clone()];
            piece.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - piece.iter().cloned().fold(f64::INFINITY, f64::min)
        }
        _ => f64::INFINITY,
    };
    report.below("gamma1_theta_oscillation", osc, FRAC_PI_2);
    report.equals("self_crossings", self_intersections(curve).len() as f64, 0.0);
    (report, gamma1)
}
