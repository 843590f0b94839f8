use serde::{Deserialize, Serialize};

use super::FlowError;

/// Numerical controls for the curve flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub target_spacing: f64,
    #[serde(default = "default_cfl")]
    pub cfl_factor: f64,
    pub max_time: f64,
    /// Radius at which open far ends are truncated and clamped.
    #[serde(default = "default_truncation")]
    pub truncation_radius: f64,
    /// Loops below this area (and below ten spacings across) collapse.
    /// Defaults to `(3 h)^2`.
    #[serde(default)]
    pub surgery_area_threshold: Option<f64>,
    /// Flags a blowup when `max |k| * min spacing` exceeds this.
    #[serde(default = "default_blowup")]
    pub curvature_blowup_threshold: f64,
    /// Steps between remeshing passes.
    #[serde(default = "default_period")]
    pub resample_period: u32,
    /// Fewest nodes a closed component is coarsened to.
    #[serde(default = "default_min_closed")]
    pub min_closed_nodes: usize,
}

fn default_cfl() -> f64 {
    0.25
}

fn default_truncation() -> f64 {
    30.0
}

fn default_blowup() -> f64 {
    1.9
}

fn default_period() -> u32 {
    1
}

fn default_min_closed() -> usize {
    12
}

/// Loops narrower than this many target spacings are considered unresolved.
pub const COLLAPSE_DIAMETER_SPACINGS: f64 = 10.0;

impl FlowConfig {
    pub fn new(target_spacing: f64, max_time: f64) -> Self {
        FlowConfig {
            target_spacing,
            cfl_factor: default_cfl(),
            max_time,
            truncation_radius: default_truncation(),
            surgery_area_threshold: None,
            curvature_blowup_threshold: default_blowup(),
            resample_period: default_period(),
            min_closed_nodes: default_min_closed(),
        }
    }

    pub fn area_threshold(&self) -> f64 {
        self.surgery_area_threshold
            .unwrap_or(9.0 * self.target_spacing * self.target_spacing)
    }

    pub fn collapse_diameter(&self) -> f64 {
        COLLAPSE_DIAMETER_SPACINGS * self.target_spacing
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let positive = [
            ("target_spacing", self.target_spacing),
            ("cfl_factor", self.cfl_factor),
            ("max_time", self.max_time),
            ("truncation_radius", self.truncation_radius),
            ("curvature_blowup_threshold", self.curvature_blowup_threshold),
            ("surgery_area_threshold", self.area_threshold()),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.cfl_factor > 0.5 {
            return Err(FlowError::InvalidConfig(format!(
                "cfl_factor must be at most 0.5, got {}",
                self.cfl_factor
            )));
        }
        if self.resample_period == 0 {
            return Err(FlowError::InvalidConfig("resample_period must be at least 1".into()));
        }
        if self.min_closed_nodes < 3 {
            return Err(FlowError::InvalidConfig("min_closed_nodes must be at least 3".into()));
        }
        Ok(())
    }
}
