use crate::geometry::{EquivariantProfile, PlanarCurve, Point};

use super::ProfileError;

/// Radial polyline from the origin to `length` at polar angle `angle`,
/// the profile of a Lagrangian plane.
pub fn ray(angle: f64, length: f64, spacing: f64) -> Result<EquivariantProfile, ProfileError> {
    if !(spacing > 0.0 && length > 3.0 * spacing) {
        return Err(ProfileError::InvalidSpec(format!(
            "ray needs length > 3 spacing, got length {length}, spacing {spacing}"
        )));
    }
    let n = (length / spacing).round() as usize;
    let dir = Point::from_polar(1.0, angle);
    let nodes = (0..=n).map(|k| dir * (length * k as f64 / n as f64)).collect();
    Ok(EquivariantProfile::new(PlanarCurve::open(nodes)?, angle)?)
}
