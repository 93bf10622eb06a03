//! MINLP solvers: a branch-and-bound search over binaries with a
//! multi-start continuous subsolver, an exhaustive enumeration oracle for
//! verification, and the independent-planning baseline.
//!
//! The continuous relaxations are nonconvex, so local solves do not certify
//! global bounds; branch-and-bound therefore reports `HeuristicGlobal` and
//! prunes conservatively, while `enumerate_oracle` certifies desk-scale
//! instances by exhausting the binary combinations.

pub mod baseline;
pub mod bnb;
pub mod oracle;
pub mod subnlp;

pub use baseline::{compare_joint_vs_independent, independent_baseline, CompareReport, PlanChoice};
pub use bnb::{branch_and_bound, branch_and_bound_with};
pub use oracle::enumerate_oracle;

use crate::model::ValidationReport;
use crate::nlp::FeasibilityReport;
use crate::Real;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Acceptance tolerance for the exact-form feasibility check.
    pub feas_tol: Real,
    /// Distance from 0/1 below which a binary counts as integral.
    pub int_tol: Real,
    /// Relative optimality gap at which the search stops.
    pub gap: Real,
    pub node_limit: usize,
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    /// Total inner-iteration budget per continuous solve.
    pub subsolver_iters: usize,
    pub stationarity_tol: Real,
    /// Multi-start count for continuous solves.
    pub n_starts: usize,
    pub seed: u64,
    /// Maximum binary count the enumeration oracle accepts.
    pub oracle_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feas_tol: 1e-6,
            int_tol: 1e-6,
            gap: 1e-4,
            node_limit: 5000,
            time_limit: None,
            subsolver_iters: 5000,
            stationarity_tol: 1e-7,
            n_starts: 5,
            seed: 0,
            oracle_cap: 24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// Gap closed against multi-start local bounds; not a global
    /// certificate.
    HeuristicGlobal,
    /// Best over the exhaustive enumeration of binary combinations.
    OracleCertified,
    /// Node or time limit hit; the incumbent is feasible but the gap is
    /// open.
    LimitHit,
}

/// A feasible solution: the expansion plan, the full operational schedule by
/// variable name, and solve diagnostics. Accepted solutions always pass the
/// exact-form feasibility check.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: Real,
    /// Best known upper bound (maximization).
    pub bound: Real,
    /// `(bound - objective) / max(1, |bound|)`.
    pub gap: Real,
    pub nodes: usize,
    pub seconds: f64,
    /// Candidate id -> built flag.
    pub plan: BTreeMap<String, bool>,
    /// Variable name -> value at the incumbent.
    pub schedule: BTreeMap<String, Real>,
    pub feasibility: FeasibilityReport,
}

impl Solution {
    /// Ids of built components, in candidate order.
    pub fn built(&self) -> Vec<String> {
        self.plan.iter().filter(|(_, &b)| b).map(|(k, _)| k.clone()).collect()
    }

    pub fn value(&self, name: &str) -> Option<Real> {
        self.schedule.get(name).copied()
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("instance failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error("problem is infeasible")]
    Infeasible,
    #[error("limit hit before any feasible solution was found")]
    NoIncumbentAtLimit,
    #[error("binary count {n} exceeds the oracle cap {cap}")]
    OracleCapExceeded { n: usize, cap: usize },
}
