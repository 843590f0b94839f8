use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{frames, lagrangian_angle, liouville_primitive, normal_part, GeometryError, PlanarCurve};

/// `int |x_perp - 2t H|^2 Phi(0, 4 - t)` over the swept surface, where `H` is
/// the flow velocity `k - x_perp/|x|^2`. Zero exactly on self-expanders at
/// time `t`.
pub fn expander_closeness(curve: &PlanarCurve, t: f64) -> f64 {
    assert!(t > 0.0 && t < 4.0, "closeness needs 0 < t < 4, got {t}");
    let l = 4.0 - t;
    let z = curve.nodes();
    let fr = frames(curve);
    let lengths = curve.segment_lengths();
    let n = z.len();
    let mut sum = 0.0;
    for i in 0..n {
        let p = z[i];
        let r2 = p.norm_sqr();
        if r2 == 0.0 {
            continue;
        }
        let perp = normal_part(p, fr[i].tangent);
        let misfit = perp - (fr[i].curvature - perp / r2) * (2.0 * t);
        let ds = match (curve.is_closed(), i) {
            (true, _) => 0.5 * (lengths[(i + n - 1) % n] + lengths[i]),
            (false, 0) => 0.5 * lengths[0],
            (false, i) if i == n - 1 => 0.5 * lengths[i - 1],
            (false, i) => 0.5 * (lengths[i - 1] + lengths[i]),
        };
        sum += p.norm() * 2.0 * PI * misfit.norm_sqr() * (-r2 / (4.0 * l)).exp() * ds;
    }
    sum / (4.0 * PI * l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaTheta {
    /// `max - min` of `beta + 2 t theta` over nodes within the radius.
    pub oscillation: f64,
    pub nodes_used: usize,
}

/// Oscillation of `beta + 2 t theta` over nodes with `|z| < radius`, with
/// `beta` the Liouville primitive from node 0 and `theta` the lifted
/// Lagrangian angle.
pub fn beta_theta_invariant(curve: &PlanarCurve, t: f64, radius: f64) -> Result<BetaTheta, GeometryError> {
    let beta = liouville_primitive(curve);
    let theta = lagrangian_angle(curve)?;
    let vals: Vec<f64> = curve
        .nodes()
        .iter()
        .zip(beta.iter().zip(&theta))
        .filter(|(z, _)| z.norm() < radius)
        .map(|(_, (b, th))| b + 2.0 * t * th)
        .collect();
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(BetaTheta {
        oscillation: if vals.is_empty() { 0.0 } else { hi - lo },
        nodes_used: vals.len(),
    })
}
