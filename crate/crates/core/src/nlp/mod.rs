//! Evaluable nonlinear program: variable indexing, residual records, exact
//! Jacobians, assembly from a [`crate::model::JointNetwork`], and the
//! independent feasibility checker used to accept solutions.

pub mod assemble;
pub mod expr;
pub mod names;
pub mod system;
pub mod vars;

pub use assemble::{assemble, assemble_with, AssembleOptions};
pub use expr::{EvalMode, Expr};
pub use system::{ConstraintSystem, FeasibilityReport, NlpError, Residual, ResidualKind, SystemBuilder};
pub use vars::{BinClass, VariableSpace};
