//! Monotone quantities and singularity signatures measured on curves and
//! trajectories.

mod angle_jump;
mod density;
mod intersections;
mod loop_area;
mod report;
mod series;
mod soliton;

pub use angle_jump::{angle_difference, angle_jump_tracker, AngleJump, Jump};
pub use density::{density_monotonicity_check, gaussian_density, Density, DensityQuery};
pub use intersections::{intersection_count_series, CountReference};
pub use loop_area::{loop_area_law_check, singular_time_bound_check};
pub use report::{Report, Verdict};
pub use series::TimeSeries;
pub use soliton::{beta_theta_invariant, expander_closeness, BetaTheta};
