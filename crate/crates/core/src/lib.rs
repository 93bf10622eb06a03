//! Joint expansion planning of interdependent power and water distribution
//! networks.
//!
//! The crate models both networks over a discretized horizon, couples them
//! through the electrical draw of fixed-speed pumps, assembles the result as
//! a mixed-integer nonlinear program, and solves it at desk scale with a
//! built-in branch-and-bound search plus an exhaustive enumeration oracle.
//! The [`scenario`] module reconstructs the bundled 3-bus / 3-node test case
//! and runs the budget-sweep experiments; the companion CLI exposes all of
//! it on the command line.
//!
//! Instances are JSON documents (schema `jwpx-1`); see
//! [`model::JointNetwork`].

pub mod coupling;
pub mod math;
pub mod model;
pub mod nlp;
pub mod power;
pub mod scenario;
pub mod solver;
pub mod water;

/// Scalar type used by the solver stack. The physics kernels in [`math`]
/// are generic over `num_traits::Float`; the assembled problem, tolerances,
/// and file formats are fixed to `f64`.
pub type Real = f64;

pub use model::{JointNetwork, ValidationReport};
pub use nlp::{assemble, ConstraintSystem, FeasibilityReport};
pub use solver::{branch_and_bound, enumerate_oracle, Solution, SolverConfig};
