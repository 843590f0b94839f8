use crate::geometry::{circumcircle_curvature, frames, normal_part, PlanarCurve, Point};

use super::FlowError;

/// Nodes closer than this to the origin (other than a profile's node 0) make
/// the forcing term singular.
pub const SINGULAR_RADIUS: f64 = 1e-8;

/// `V = k - z_perp / |z|^2` at every node.
///
/// At the origin node of a profile the forcing has the limit `k/2`, so the
/// velocity there is `k/2` with `k` from the osculating circle through the
/// first three nodes. The flow re-pins that node, so this value is reported
/// rather than used.
pub fn velocity_field(curve: &PlanarCurve) -> Result<Vec<Point>, FlowError> {
    let z = curve.nodes();
    let origin_start = curve.starts_at_origin();
    frames(curve)
        .iter()
        .zip(z)
        .enumerate()
        .map(|(i, (f, &p))| {
            if i == 0 && origin_start {
                return Ok(origin_curvature(z) * 0.5);
            }
            let r2 = p.norm_sqr();
            if r2 < SINGULAR_RADIUS * SINGULAR_RADIUS {
                return Err(FlowError::SingularForcing { component: None, node: i });
            }
            Ok(f.curvature - normal_part(p, f.tangent) / r2)
        })
        .collect()
}

/// Curvature vector at the origin of the circle through the first three
/// nodes, carried to node 0.
fn origin_curvature(z: &[Point]) -> Point {
    let k = circumcircle_curvature(z[0], z[1], z[2]);
    if k.norm_sqr() == 0.0 {
        return k;
    }
    let center = z[1] + k / k.norm_sqr();
    (center - z[0]) / (center - z[0]).norm_sqr()
}
