//! Discrete differential geometry of oriented polylines in the complex plane.

mod curve;
mod distance;
mod frames;
mod intersect;
mod loops;
mod resample;
mod squaring;

pub use curve::{cone_violations, point_set_diameter, EquivariantProfile, PlanarCurve, Point};
pub use distance::{distance_to_curve, hausdorff_within};
pub use frames::{
    circumcircle_curvature, frames, h_length, lagrangian_angle, liouville_primitive, normal_part,
    quadratic_growth_constant, rotation_index, tangent_angle_lift, unwrap, wrap_angle, Frame,
};
pub use intersect::{cross_intersections, segment_intersection, self_intersections, Crossing};
pub use loops::{extract_loops, loops_of, shoelace_area, winding_number, LoopDescriptor};
pub use resample::{arclength_positions, remesh, resample, sample_at, RemeshStats};
pub use squaring::{inverse_branch, ray_pair_preimage, squaring_transform, Branch, LineParams};

pub(crate) use frames::{cross, dot};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curve needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("node {0} is not finite")]
    NonFinite(usize),
    #[error("nodes {0} and {next} coincide", next = .0 + 1)]
    CoincidentNodes(usize),
    #[error("closed curve repeats its first node")]
    RepeatedClosingNode,
    #[error("not an equivariant profile: {0}")]
    NotAProfile(String),
    #[error("interior node {0} sits at the origin; Lagrangian angle is singular there")]
    SingularAngle(usize),
    #[error("degenerate curve: {0}")]
    Degenerate(String),
    #[error("line passes through the branch point; its preimage is a pair of rays")]
    LineThroughOrigin,
}
