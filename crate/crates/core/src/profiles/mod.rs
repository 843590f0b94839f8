//! Constructors for the distinguished curves: rays, Lawlor necks,
//! self-expanders, the singular-scenario curve and the Whitney-type curve.

mod expander;
mod lawlor;
mod ray;
mod sigma;
mod validation;
mod whitney;

pub use expander::{expander_profile, expander_residual, ExpanderProfile, ExpanderSpec, Residual};
pub use lawlor::{lawlor_profile, stationarity_residual, LawlorProfile};
pub use ray::ray;
pub use sigma::{sigma_curve, validate_sigma, SigmaProfile, SigmaSpec};
pub use validation::{Check, ValidationReport};
pub use whitney::{validate_whitney, whitney_curve, WhitneyCurve, WhitneySpec};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("no curve in the family satisfies {what}: measured {measured}")]
    Infeasible { what: String, measured: f64 },
    #[error("shooting bracket has no sign change; samples (r0, angle): {trace:?}")]
    ShootingBracket { trace: Vec<(f64, f64)> },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
