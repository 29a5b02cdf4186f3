//! Flip processes and their graphon trajectories.
//!
//! A flip process of order `k` repeatedly samples an ordered `k`-tuple of
//! distinct vertices in a large graph, reads off the induced labelled graph
//! `F`, and rewrites it with a replacement graph `H` drawn from row `F` of a
//! row-stochastic *rule*. Rescaled by `n^2`, the process concentrates around
//! a deterministic graphon trajectory driven by the rule's velocity operator.
//!
//! This crate decides, exactly, when two rules drive the same trajectories.
//! Two rules of equal order share trajectories precisely when their
//! orbit-summed edge-change coefficients agree on every isomorphism class of
//! pair-rooted graphs; rules of different orders are compared after lifting.
//!
//! Modules:
//! - [`graph`]: labelled graph codes, permutation orbits, twinfree versions,
//!   blowups and rooted-map enumeration.
//! - [`rule`]: exact-rational rule matrices, validation and named families.
//! - [`equivalence`]: coefficient certificates, comparison, lifting,
//!   symmetrization, uniqueness witnesses and dilation factors.
//! - [`dynamics`]: step-kernel densities, the velocity operator and an RK4
//!   trajectory integrator, generic over the [`Scalar`] type.
//! - [`sim`]: the discrete flip process and a transference check against
//!   integrated trajectories.

pub mod dynamics;
pub mod equivalence;
pub mod error;
pub mod graph;
pub mod rational;
pub mod rule;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use rational::Rational;
pub use scalar::Scalar;

/// Default largest order for which whole orbit-class tables are built.
pub const DEFAULT_CAP: usize = 6;

/// Step kernel with double-precision block values.
pub type Kernel = dynamics::StepKernel<f64>;
/// Step kernel with single-precision block values.
pub type Kernel32 = dynamics::StepKernel<f32>;
/// Step kernel evaluated in exact rational arithmetic.
pub type ExactKernel = dynamics::StepKernel<Rational>;
/// Trajectory sampled in double precision.
pub type Trajectory = dynamics::Trajectory<f64>;
/// Velocity operator specialised to `f64`.
pub type Velocity = dynamics::VelocityOperator<f64>;
