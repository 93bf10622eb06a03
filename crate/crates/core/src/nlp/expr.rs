//! Residual expressions: constant + linear + quadratic terms plus the
//! Hazen-Williams friction kernel. This small closed family covers every
//! constraint emitted by the builders, which keeps evaluation and the
//! hand-coded Jacobians exact.

use crate::math;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinTerm {
    pub var: usize,
    pub coef: Real,
}

/// `coef * x[a] * x[b]` (a may equal b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTerm {
    pub a: usize,
    pub b: usize,
    pub coef: Real,
}

/// `coef * hw(x[q])` where `hw` is the Hazen-Williams kernel, smoothed or
/// exact depending on the evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwTerm {
    pub q: usize,
    pub coef: Real,
}

/// How nonsmooth kernels are evaluated. Solvers use [`EvalMode::Smoothed`];
/// the feasibility checker always uses [`EvalMode::Exact`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Smoothed,
    Exact,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expr {
    pub constant: Real,
    pub lin: Vec<LinTerm>,
    pub quad: Vec<QuadTerm>,
    pub hw: Vec<HwTerm>,
}

impl Expr {
    pub fn new() -> Self {
        Expr::default()
    }

    pub fn with_constant(c: Real) -> Self {
        Expr { constant: c, ..Default::default() }
    }

    pub fn add_lin(&mut self, var: usize, coef: Real) -> &mut Self {
        if coef != 0.0 {
            self.lin.push(LinTerm { var, coef });
        }
        self
    }

    pub fn add_quad(&mut self, a: usize, b: usize, coef: Real) -> &mut Self {
        if coef != 0.0 {
            self.quad.push(QuadTerm { a, b, coef });
        }
        self
    }

    pub fn add_hw(&mut self, q: usize, coef: Real) -> &mut Self {
        if coef != 0.0 {
            self.hw.push(HwTerm { q, coef });
        }
        self
    }

    pub fn is_linear(&self) -> bool {
        self.quad.is_empty() && self.hw.is_empty()
    }

    pub fn eval(&self, x: &[Real], mode: EvalMode) -> Real {
        let mut v = self.constant;
        for t in &self.lin {
            v += t.coef * x[t.var];
        }
        for t in &self.quad {
            v += t.coef * x[t.a] * x[t.b];
        }
        for t in &self.hw {
            let q = x[t.q];
            v += t.coef
                * match mode {
                    EvalMode::Smoothed => math::hazen_williams_smooth(q, math::HW_DELTA),
                    EvalMode::Exact => math::hazen_williams(q),
                };
        }
        v
    }

    /// Sorted, deduplicated variable indices this expression touches.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .lin
            .iter()
            .map(|t| t.var)
            .chain(self.quad.iter().flat_map(|t| [t.a, t.b]))
            .chain(self.hw.iter().map(|t| t.q))
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Gradient entries as `(var, d/dvar)` pairs aligned with [`support`].
    pub fn gradient(&self, x: &[Real], mode: EvalMode) -> Vec<(usize, Real)> {
        let support = self.support();
        let mut g: Vec<(usize, Real)> = support.iter().map(|&v| (v, 0.0)).collect();
        let pos = |v: usize| support.binary_search(&v).expect("var in support");
        for t in &self.lin {
            g[pos(t.var)].1 += t.coef;
        }
        for t in &self.quad {
            g[pos(t.a)].1 += t.coef * x[t.b];
            g[pos(t.b)].1 += t.coef * x[t.a];
        }
        for t in &self.hw {
            let q = x[t.q];
            let d = match mode {
                EvalMode::Smoothed => math::hazen_williams_smooth_deriv(q, math::HW_DELTA),
                EvalMode::Exact => math::hazen_williams_deriv(q),
            };
            g[pos(t.q)].1 += t.coef * d;
        }
        g
    }

    /// Rough magnitude bound used for residual scaling: sum of |coef| times
    /// the largest absolute value each variable can take.
    pub fn magnitude_estimate(&self, lo: &[Real], hi: &[Real]) -> Real {
        let amax = |v: usize| lo[v].abs().max(hi[v].abs()).min(1e6);
        let mut m = self.constant.abs();
        for t in &self.lin {
            m += t.coef.abs() * amax(t.var);
        }
        for t in &self.quad {
            m += t.coef.abs() * amax(t.a) * amax(t.b);
        }
        for t in &self.hw {
            m += t.coef.abs() * math::hazen_williams(amax(t.q));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_and_gradient_agree_with_finite_differences() {
        let mut e = Expr::with_constant(0.5);
        e.add_lin(0, 2.0).add_quad(0, 1, -3.0).add_quad(2, 2, 1.5).add_hw(1, 0.7);
        let x = vec![0.3, -0.8, 1.2];
        let h = 1e-6;
        for (v, g) in e.gradient(&x, EvalMode::Smoothed) {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[v] += h;
            xm[v] -= h;
            let fd = (e.eval(&xp, EvalMode::Smoothed) - e.eval(&xm, EvalMode::Smoothed)) / (2.0 * h);
            assert_relative_eq!(g, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn representation_independent_under_index_permutation() {
        // same expression with variables relabeled evaluates identically
        let mut a = Expr::new();
        a.add_lin(0, 1.0).add_quad(0, 1, 2.0).add_hw(2, 3.0);
        let mut b = Expr::new();
        b.add_lin(2, 1.0).add_quad(2, 0, 2.0).add_hw(1, 3.0);
        let xa = vec![0.4, -1.1, 0.9];
        let xb = vec![-1.1, 0.9, 0.4]; // permuted consistently
        assert_eq!(a.eval(&xa, EvalMode::Exact), b.eval(&xb, EvalMode::Exact));
    }

    #[test]
    fn support_is_sorted_and_deduped() {
        let mut e = Expr::new();
        e.add_quad(5, 5, 1.0).add_lin(2, 1.0).add_hw(5, 1.0);
        assert_eq!(e.support(), vec![2, 5]);
    }
}
