pub mod diagnostics;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod profiles;
pub mod render;
pub mod scenario;
