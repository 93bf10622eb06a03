//! The assembled nonlinear program: residual records, objective, exact
//! Jacobians, and the independent feasibility checker.

use super::expr::{EvalMode, Expr};
use super::vars::VariableSpace;
use crate::Real;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NlpError {
    #[error("dimension mismatch: point has {got} entries, system has {expected} variables")]
    DimensionMismatch { got: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    /// `expr = 0`
    Eq,
    /// `expr <= 0`
    Le,
}

/// One constraint row. `tag` names the constraint family; `label` pins the
/// emitting entity and time index for diagnostics.
#[derive(Debug, Clone)]
pub struct Residual {
    pub kind: ResidualKind,
    pub tag: &'static str,
    pub label: String,
    pub expr: Expr,
}

/// Worst violations of a point against the exact constraint forms.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub max_equality: Real,
    pub max_inequality: Real,
    pub max_bound: Real,
    pub worst_equality: Option<(String, Real)>,
    pub worst_inequality: Option<(String, Real)>,
    pub accepted: bool,
    pub tolerance: Real,
}

impl FeasibilityReport {
    pub fn max_violation(&self) -> Real {
        self.max_equality.max(self.max_inequality).max(self.max_bound)
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub vars: VariableSpace,
    pub residuals: Vec<Residual>,
    /// Linear objective, maximized.
    pub objective: Expr,
}

impl ConstraintSystem {
    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_residuals(&self) -> usize {
        self.residuals.len()
    }

    fn check_dim(&self, x: &[Real]) -> Result<(), NlpError> {
        if x.len() != self.vars.len() {
            return Err(NlpError::DimensionMismatch { got: x.len(), expected: self.vars.len() });
        }
        Ok(())
    }

    pub fn eval_objective(&self, x: &[Real]) -> Real {
        self.objective.eval(x, EvalMode::Exact)
    }

    /// Evaluates every residual at `x`. Deterministic; finite for in-bounds
    /// points under the smoothed mode.
    pub fn eval_residuals(&self, x: &[Real], mode: EvalMode) -> Result<Vec<Real>, NlpError> {
        self.check_dim(x)?;
        Ok(self.residuals.iter().map(|r| r.expr.eval(x, mode)).collect())
    }

    /// Analytic Jacobian as one sparse row per residual, `(col, value)`
    /// pairs sorted by column.
    pub fn eval_jacobian(&self, x: &[Real], mode: EvalMode) -> Result<Vec<Vec<(usize, Real)>>, NlpError> {
        self.check_dim(x)?;
        Ok(self.residuals.iter().map(|r| r.expr.gradient(x, mode)).collect())
    }

    /// Column support per residual (the declared sparsity pattern).
    pub fn sparsity(&self) -> Vec<Vec<usize>> {
        self.residuals.iter().map(|r| r.expr.support()).collect()
    }

    /// Judges `x` against the exact (unsmoothed) constraint forms and the
    /// variable bounds. Accepted iff every violation is within `tol`.
    pub fn check_feasible(&self, x: &[Real], tol: Real) -> Result<FeasibilityReport, NlpError> {
        self.check_dim(x)?;
        let mut max_eq: Real = 0.0;
        let mut max_le: Real = 0.0;
        let mut worst_eq: Option<(String, Real)> = None;
        let mut worst_le: Option<(String, Real)> = None;
        for r in &self.residuals {
            let v = r.expr.eval(x, EvalMode::Exact);
            match r.kind {
                ResidualKind::Eq => {
                    let a = v.abs();
                    if a > max_eq {
                        max_eq = a;
                        worst_eq = Some((format!("{} [{}]", r.tag, r.label), a));
                    }
                }
                ResidualKind::Le => {
                    let a = v.max(0.0);
                    if a > max_le {
                        max_le = a;
                        worst_le = Some((format!("{} [{}]", r.tag, r.label), a));
                    }
                }
            }
        }
        let max_bound = self.vars.max_bound_violation(x);
        let accepted = max_eq <= tol && max_le <= tol && max_bound <= tol;
        Ok(FeasibilityReport {
            max_equality: max_eq,
            max_inequality: max_le,
            max_bound,
            worst_equality: worst_eq,
            worst_inequality: worst_le,
            accepted,
            tolerance: tol,
        })
    }

    /// Flat-text listing of variables and residuals for diffing across
    /// versions.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "# variables: {}", self.vars.len()).unwrap();
        for i in 0..self.vars.len() {
            let (lo, hi) = self.vars.bounds(i);
            let bin = if self.vars.is_binary(i) { " binary" } else { "" };
            writeln!(out, "var {} {} [{}, {}]{}", i, self.vars.name(i), lo, hi, bin).unwrap();
        }
        writeln!(out, "# residuals: {}", self.residuals.len()).unwrap();
        for (i, r) in self.residuals.iter().enumerate() {
            let kind = match r.kind {
                ResidualKind::Eq => "eq",
                ResidualKind::Le => "le",
            };
            writeln!(out, "res {} {} {} [{}]", i, kind, r.tag, r.label).unwrap();
        }
        out
    }
}

/// Accumulates variables and residuals during assembly.
#[derive(Debug, Default)]
pub struct SystemBuilder {
    pub vars: VariableSpace,
    pub residuals: Vec<Residual>,
    pub objective: Expr,
}

impl SystemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_eq(&mut self, tag: &'static str, label: String, expr: Expr) {
        self.residuals.push(Residual { kind: ResidualKind::Eq, tag, label, expr });
    }

    pub fn add_le(&mut self, tag: &'static str, label: String, expr: Expr) {
        self.residuals.push(Residual { kind: ResidualKind::Le, tag, label, expr });
    }

    pub fn finish(self) -> ConstraintSystem {
        ConstraintSystem { vars: self.vars, residuals: self.residuals, objective: self.objective }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ConstraintSystem {
        let mut b = SystemBuilder::new();
        let x = b.vars.add("x".into(), -2.0, 2.0);
        let y = b.vars.add("y".into(), -2.0, 2.0);
        let mut e = Expr::new();
        e.add_lin(x, 1.0).add_lin(y, 1.0).constant = -1.0;
        b.add_eq("sum", "x+y=1".into(), e);
        let mut q = Expr::new();
        q.add_quad(x, x, 1.0).constant = -1.0;
        b.add_le("disc", "x^2<=1".into(), q);
        b.objective.add_lin(y, 1.0);
        b.finish()
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = toy();
        assert!(s.eval_residuals(&[1.0], EvalMode::Exact).is_err());
        assert!(s.eval_jacobian(&[1.0, 2.0, 3.0], EvalMode::Exact).is_err());
    }

    #[test]
    fn feasibility_report_flags_worst_offender() {
        let s = toy();
        let rep = s.check_feasible(&[2.0, 2.0], 1e-9).unwrap();
        assert!(!rep.accepted);
        assert_eq!(rep.max_equality, 3.0);
        assert!(rep.worst_equality.unwrap().0.starts_with("sum"));
        assert_eq!(rep.max_inequality, 3.0);

        let rep = s.check_feasible(&[0.5, 0.5], 1e-9).unwrap();
        assert!(rep.accepted);
    }

    #[test]
    fn dump_lists_vars_and_residuals() {
        let d = toy().dump();
        assert!(d.contains("var 0 x"));
        assert!(d.contains("res 0 eq sum"));
    }
}
