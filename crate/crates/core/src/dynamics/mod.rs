//! Step graphons, rooted induced densities and trajectories.
//!
//! A trajectory started at a step graphon stays a step function on the same
//! partition, because the velocity on a block only depends on which parts
//! its two points lie in. The ODE on the `m(m+1)/2` block values is
//! therefore exact, and everything here works on that finite system.

mod density;
mod integrate;
mod kernel;
mod velocity;

pub use density::{density_formula_check, rooted_density, rooted_density_graph};
pub use integrate::{integrate, integrate_at, IntegrateOptions, Trajectory, DRIFT_TOLERANCE};
pub use kernel::{Number, StepKernel, StepKernelFile};
pub use velocity::{lipschitz_constant, velocity, VelocityOperator};
