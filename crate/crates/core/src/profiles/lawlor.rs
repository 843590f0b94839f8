use serde::{Deserialize, Serialize};

use crate::flow::velocity_field;
use crate::geometry::{inverse_branch, ray_pair_preimage, Branch, LineParams, PlanarCurve};

use super::{ProfileError, ValidationReport};

/// A stationary neck, or the pair of rays it degenerates to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawlorProfile {
    /// One neck, or two rays from the origin when `singular`.
    pub components: Vec<PlanarCurve>,
    pub singular: bool,
    /// Far-field directions `(psi, psi + pi/2)` up to the sign of the offset.
    pub asymptote_angles: (f64, f64),
    pub report: ValidationReport,
}

impl LawlorProfile {
    pub fn curve(&self) -> &PlanarCurve {
        &self.components[0]
    }
}

/// Largest `|k - x_perp/|x|^2|` over interior nodes; zero on exact
/// stationary curves up to discretisation.
pub fn stationarity_residual(curve: &PlanarCurve) -> f64 {
    let Ok(v) = velocity_field(curve) else {
        return f64::INFINITY;
    };
    let n = v.len();
    let skip = usize::from(!curve.is_closed());
    v[skip..n - skip].iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Preimage under `z -> z^2/2` of the line at signed distance `offset` with
/// direction angle `direction` (= 2 psi), on the positive branch.
///
/// A zero offset gives the two rays at `psi` and `psi + pi/2`, flagged singular.
pub fn lawlor_profile(offset: f64, direction: f64, extent: f64, spacing: f64) -> Result<LawlorProfile, ProfileError> {
    if !(extent > 0.0 && spacing > 0.0 && offset.is_finite() && direction.is_finite()) {
        return Err(ProfileError::InvalidSpec(format!(
            "need finite offset/direction and positive extent/spacing, got {offset}, {direction}, {extent}, {spacing}"
        )));
    }
    let mut report = ValidationReport::default();
    if offset == 0.0 {
        let rays = ray_pair_preimage(direction, extent, spacing)?;
        for r in &rays {
            report.below("stationarity_residual", stationarity_residual(r), 1e-12);
        }
        let psi = direction / 2.0;
        return Ok(LawlorProfile {
            components: rays.to_vec(),
            singular: true,
            asymptote_angles: (psi, psi + std::f64::consts::FRAC_PI_2),
            report,
        });
    }
    let line = LineParams { offset, direction };
    let curve = inverse_branch(line, Branch::Positive, extent, spacing)?;
    report.below(
        "stationarity_residual",
        stationarity_residual(&curve),
        1e-3 / curve.diameter(),
    );
    Ok(LawlorProfile {
        components: vec![curve],
        singular: false,
        asymptote_angles: line.asymptote_angles(Branch::Positive),
        report,
    })
}
