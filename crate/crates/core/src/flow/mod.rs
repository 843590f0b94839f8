//! Time integration of `dx/dt = k - x_perp / |x|^2` with origin pinning,
//! clamped far ends, loop detection and surgery.

mod config;
mod run;
mod singularity;
mod state;
mod step;
mod velocity;

pub use config::{FlowConfig, COLLAPSE_DIAMETER_SPACINGS};
pub use run::{run, Hook, RunError, RunSeries, SampleKind, Snapshot, Trajectory};
pub use singularity::{detect_singularity, log_singularity, remove_component, surgery, Singularity};
pub use state::{Component, EndCondition, Ends, Event, EventKind, FlowState, StepStats};
pub use step::{max_curvature, stable_dt, step, MIN_DT};
pub use velocity::{velocity_field, SINGULAR_RADIUS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("invalid flow config: {0}")]
    InvalidConfig(String),
    #[error("node {node}{} is within the singular radius of the origin", component.map(|c| format!(" of component {c}")).unwrap_or_default())]
    SingularForcing { component: Option<usize>, node: usize },
    #[error("time step {dt:e} underflowed")]
    Stall { dt: f64 },
    #[error("non-finite positions in component {component}")]
    NumericalBlowup { component: usize },
    #[error("unsupported surgery: {0}")]
    UnsupportedSurgery(String),
    #[error("geometry: {0}")]
    Geometry(String),
}

impl FlowError {
    pub(crate) fn in_component(self, idx: usize) -> Self {
        match self {
            FlowError::SingularForcing { node, .. } => FlowError::SingularForcing {
                component: Some(idx),
                node,
            },
            other => other,
        }
    }
}
