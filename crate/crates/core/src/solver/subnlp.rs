//! Continuous subsolver for the smooth relaxation: a bound-constrained
//! augmented Lagrangian driven by a spectral projected gradient, followed by
//! a damped Gauss-Newton feasibility polish against the exact constraint
//! forms. First-order only; everything it needs from the problem is the
//! residual/Jacobian contract.

use super::SolverConfig;
use crate::nlp::system::{ConstraintSystem, ResidualKind};
use crate::nlp::EvalMode;
use crate::Real;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubStatus {
    Solved,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct SubOutcome {
    pub status: SubStatus,
    pub x: Vec<Real>,
    pub objective: Real,
    /// Exact-form max violation at `x`.
    pub violation: Real,
}

/// Linear presolve: feasibility-based bound tightening over the linear
/// rows. Tightens `lo`/`hi` in place and returns `true` when some domain
/// empties, which catches budget-violating fixings and gating chains
/// (status forced off while a pinned demand needs flow) before any NLP
/// work.
pub fn linear_presolve_infeasible(sys: &ConstraintSystem, lo: &mut [Real], hi: &mut [Real]) -> bool {
    let tol = 1e-9;
    for _round in 0..5 {
        let mut changed = false;
        for r in &sys.residuals {
            if !r.expr.is_linear() {
                continue;
            }
            // activity interval of the whole row
            let mut min = r.expr.constant;
            let mut max = r.expr.constant;
            for t in &r.expr.lin {
                if t.coef >= 0.0 {
                    min += t.coef * lo[t.var];
                    max += t.coef * hi[t.var];
                } else {
                    min += t.coef * hi[t.var];
                    max += t.coef * lo[t.var];
                }
            }
            match r.kind {
                ResidualKind::Le if min > tol => return true,
                ResidualKind::Eq if min > tol || max < -tol => return true,
                _ => {}
            }

            // per-variable implied bounds from the rest of the row
            for t in &r.expr.lin {
                if t.coef.abs() < 1e-9 {
                    continue;
                }
                let (term_min, term_max) = if t.coef >= 0.0 {
                    (t.coef * lo[t.var], t.coef * hi[t.var])
                } else {
                    (t.coef * hi[t.var], t.coef * lo[t.var])
                };
                let rest_min = min - term_min;
                let rest_max = max - term_max;
                // row <= 0 (or = 0): coef*v <= -rest_min
                let ub = -rest_min;
                let (mut new_lo, mut new_hi) = (lo[t.var], hi[t.var]);
                if t.coef > 0.0 {
                    new_hi = new_hi.min(ub / t.coef);
                } else {
                    new_lo = new_lo.max(ub / t.coef);
                }
                if r.kind == ResidualKind::Eq {
                    // row >= 0 too: coef*v >= -rest_max
                    let lb = -rest_max;
                    if t.coef > 0.0 {
                        new_lo = new_lo.max(lb / t.coef);
                    } else {
                        new_hi = new_hi.min(lb / t.coef);
                    }
                }
                if new_lo > new_hi + tol {
                    return true;
                }
                if new_lo > lo[t.var] + 1e-12 || new_hi < hi[t.var] - 1e-12 {
                    lo[t.var] = new_lo.min(new_hi);
                    hi[t.var] = new_hi.max(new_lo);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    false
}

/// Solves the continuous relaxation with `fixed` variables pinned. Binaries
/// not in `fixed` are relaxed into their [0,1] boxes. Runs the configured
/// multi-start protocol and returns the best exact-feasible point, or the
/// least-infeasible one with `SubStatus::Infeasible`.
pub fn solve_relaxation(
    sys: &ConstraintSystem,
    fixed: &BTreeMap<usize, Real>,
    warm: Option<&[Real]>,
    cfg: &SolverConfig,
    seed_stream: u64,
) -> SubOutcome {
    let n = sys.n_vars();
    let mut lo = sys.vars.lo().to_vec();
    let mut hi = sys.vars.hi().to_vec();
    for (&v, &val) in fixed {
        lo[v] = val;
        hi[v] = val;
    }

    {
        // presolve runs on a scratch copy: tightening is only used for
        // infeasibility detection, the solve keeps the declared boxes
        let (mut plo, mut phi) = (lo.clone(), hi.clone());
        if linear_presolve_infeasible(sys, &mut plo, &mut phi) {
            return SubOutcome {
                status: SubStatus::Infeasible,
                x: lo.clone(),
                objective: Real::NEG_INFINITY,
                violation: Real::INFINITY,
            };
        }
    }
    if n == 0 {
        return SubOutcome { status: SubStatus::Solved, x: vec![], objective: 0.0, violation: 0.0 };
    }

    let scale = Scaling::build(sys, &lo, &hi);
    let starts = build_starts(sys, &lo, &hi, warm, cfg, seed_stream);
    let iter_budget = cfg.subsolver_iters / starts.len().max(1);

    // optimize every start, then polish candidates best-first until one
    // verifies against the exact forms
    let mut cands: Vec<(Vec<Real>, bool)> = Vec::new();
    for s in starts {
        let mut x = s;
        project(&mut x, &lo, &hi);
        let hit_limit = augmented_lagrangian(sys, &scale, &lo, &hi, &mut x, iter_budget, cfg);
        cands.push((x, hit_limit));
    }
    cands.sort_by(|a, b| {
        let (va, vb) = (scaled_violation(sys, &scale, &a.0), scaled_violation(sys, &scale, &b.0));
        let (fa, fb) = (va <= 1e-4, vb <= 1e-4);
        match (fa, fb) {
            (true, true) => sys.eval_objective(&b.0).total_cmp(&sys.eval_objective(&a.0)),
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            (false, false) => va.total_cmp(&vb),
        }
    });

    let mut best: Option<SubOutcome> = None;
    for (mut x, hit_limit) in cands {
        gauss_newton_polish(sys, &scale, &lo, &hi, &mut x);
        let viol = exact_violation(sys, &x);
        let obj = sys.eval_objective(&x);
        // a point the polisher cannot push anywhere near feasibility is
        // treated as infeasible; its objective is meaningless
        let status = if viol <= cfg.feas_tol {
            SubStatus::Solved
        } else if scaled_violation(sys, &scale, &x) > 1e-5 || !hit_limit {
            SubStatus::Infeasible
        } else {
            SubStatus::IterationLimit
        };
        let cand = SubOutcome { status, x, objective: obj, violation: viol };
        let take = match &best {
            None => true,
            Some(b) => matches!(
                pick_better_ref(b, &cand, cfg),
                Pick::Second
            ),
        };
        if take {
            best = Some(cand);
        }
        // the candidate list is objective-sorted, so the first verified
        // point is the winner
        if best.as_ref().map(|b| b.violation <= cfg.feas_tol).unwrap_or(false) {
            break;
        }
    }
    best.expect("at least one start")
}

enum Pick {
    First,
    Second,
}

fn pick_better_ref(a: &SubOutcome, b: &SubOutcome, cfg: &SolverConfig) -> Pick {
    let fa = a.violation <= cfg.feas_tol;
    let fb = b.violation <= cfg.feas_tol;
    match (fa, fb) {
        (true, true) => {
            if b.objective > a.objective {
                Pick::Second
            } else {
                Pick::First
            }
        }
        (true, false) => Pick::First,
        (false, true) => Pick::Second,
        (false, false) => {
            if b.violation < a.violation {
                Pick::Second
            } else {
                Pick::First
            }
        }
    }
}

fn exact_violation(sys: &ConstraintSystem, x: &[Real]) -> Real {
    let mut v: Real = sys.vars.max_bound_violation(x);
    for r in &sys.residuals {
        let val = r.expr.eval(x, EvalMode::Exact);
        v = v.max(match r.kind {
            ResidualKind::Eq => val.abs(),
            ResidualKind::Le => val.max(0.0),
        });
    }
    v
}

fn scaled_violation(sys: &ConstraintSystem, scale: &Scaling, x: &[Real]) -> Real {
    let mut v: Real = sys.vars.max_bound_violation(x);
    for (j, r) in sys.residuals.iter().enumerate() {
        let val = r.expr.eval(x, EvalMode::Exact) * scale.row[j];
        v = v.max(match r.kind {
            ResidualKind::Eq => val.abs(),
            ResidualKind::Le => val.max(0.0),
        });
    }
    v
}

struct Scaling {
    /// Per-residual 1/magnitude weights.
    row: Vec<Real>,
    /// Per-variable ranges used as the y-space metric.
    var: Vec<Real>,
    /// Objective scale.
    obj: Real,
}

impl Scaling {
    fn build(sys: &ConstraintSystem, lo: &[Real], hi: &[Real]) -> Self {
        let row = sys
            .residuals
            .iter()
            .map(|r| 1.0 / r.expr.magnitude_estimate(lo, hi).max(1.0))
            .collect();
        let var = (0..sys.n_vars())
            .map(|i| {
                let s = sys.vars.hi()[i] - sys.vars.lo()[i];
                if s > 1e-12 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        let obj = 1.0 / sys.objective.magnitude_estimate(lo, hi).max(1.0);
        Scaling { row, var, obj }
    }
}

fn project(x: &mut [Real], lo: &[Real], hi: &[Real]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

fn build_starts(
    sys: &ConstraintSystem,
    lo: &[Real],
    hi: &[Real],
    warm: Option<&[Real]>,
    cfg: &SolverConfig,
    seed_stream: u64,
) -> Vec<Vec<Real>> {
    let n = sys.n_vars();
    let hint: Vec<Real> = (0..n).map(|i| sys.vars.hint(i).clamp(lo[i], hi[i])).collect();
    // quiescent probe: rest everything at zero where the box allows it
    let quiet: Vec<Real> = (0..n)
        .map(|i| if lo[i] <= 0.0 && 0.0 <= hi[i] { 0.0 } else { 0.5 * (lo[i] + hi[i]) })
        .collect();

    let mut starts = Vec::new();
    if let Some(w) = warm {
        let mut w = w.to_vec();
        project(&mut w, lo, hi);
        starts.push(w);
    }
    starts.push(hint.clone());
    starts.push(quiet);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(seed_stream));
    while starts.len() < cfg.n_starts.max(1) {
        let p: Vec<Real> = (0..n)
            .map(|i| {
                let span = hi[i] - lo[i];
                (hint[i] + rng.gen_range(-0.3..0.3) * span).clamp(lo[i], hi[i])
            })
            .collect();
        starts.push(p);
    }
    starts.truncate(cfg.n_starts.max(1));
    starts
}

/// Outer augmented-Lagrangian loop. Returns true if the iteration budget ran
/// out before the stationarity and feasibility targets were met.
fn augmented_lagrangian(
    sys: &ConstraintSystem,
    scale: &Scaling,
    lo: &[Real],
    hi: &[Real],
    x: &mut Vec<Real>,
    iter_budget: usize,
    cfg: &SolverConfig,
) -> bool {
    let m = sys.n_residuals();
    let mut lam = vec![0.0; m];
    let mut rho: Real = 10.0;
    let mut omega: Real = 1e-4;
    let mut used = 0usize;
    let mut prev_viol = Real::INFINITY;
    let mut stalled = 0u32;

    for _outer in 0..30 {
        if used >= iter_budget {
            return true;
        }
        let inner_cap = ((iter_budget - used) / 4).clamp(50, 600);
        used += spg_inner(sys, scale, lo, hi, x, &lam, rho, omega, inner_cap);

        // multiplier update on scaled residuals
        let res = sys.eval_residuals(x, EvalMode::Smoothed).expect("dim ok");
        let mut viol: Real = 0.0;
        for j in 0..m {
            let rj = res[j] * scale.row[j];
            match sys.residuals[j].kind {
                ResidualKind::Eq => {
                    lam[j] += rho * rj;
                    viol = viol.max(rj.abs());
                }
                ResidualKind::Le => {
                    lam[j] = (lam[j] + rho * rj).max(0.0);
                    viol = viol.max(rj.max(0.0));
                }
            }
        }

        if viol <= 1e-9 && omega <= cfg.stationarity_tol {
            return false;
        }
        // an infeasible subproblem plateaus at escalated penalty: stop
        // feeding it iterations, the caller labels it by its violation
        if viol > 0.5 && viol > 0.95 * prev_viol && rho >= 1e7 {
            stalled += 1;
            if stalled >= 3 {
                return false;
            }
        } else {
            stalled = 0;
        }
        if viol > 0.25 * prev_viol {
            rho = (rho * 10.0).min(1e8);
        }
        prev_viol = viol;
        omega = (omega * 0.1).max(cfg.stationarity_tol);
    }
    false
}

/// AL merit value at `x` (smoothed forms, scaled rows); accumulates the
/// gradient term-by-term into `grad` when given, with no per-row
/// allocation.
fn al_eval(
    sys: &ConstraintSystem,
    scale: &Scaling,
    x: &[Real],
    lam: &[Real],
    rho: Real,
    mut grad: Option<&mut [Real]>,
) -> Real {
    if let Some(g) = grad.as_deref_mut() {
        g.iter_mut().for_each(|v| *v = 0.0);
        for t in &sys.objective.lin {
            g[t.var] -= scale.obj * t.coef;
        }
    }
    // maximize objective => minimize -obj
    let mut val = -scale.obj * sys.objective.eval(x, EvalMode::Smoothed);

    for (j, r) in sys.residuals.iter().enumerate() {
        let rj = r.expr.eval(x, EvalMode::Smoothed) * scale.row[j];
        let w = match r.kind {
            ResidualKind::Eq => lam[j] + rho * rj,
            ResidualKind::Le => (lam[j] + rho * rj).max(0.0),
        };
        match r.kind {
            ResidualKind::Eq => val += lam[j] * rj + 0.5 * rho * rj * rj,
            ResidualKind::Le => val += (w * w - lam[j] * lam[j]) / (2.0 * rho),
        }
        if w != 0.0 {
            if let Some(g) = grad.as_deref_mut() {
                let ws = w * scale.row[j];
                for t in &r.expr.lin {
                    g[t.var] += ws * t.coef;
                }
                for t in &r.expr.quad {
                    g[t.a] += ws * t.coef * x[t.b];
                    g[t.b] += ws * t.coef * x[t.a];
                }
                for t in &r.expr.hw {
                    g[t.q] += ws
                        * t.coef
                        * crate::math::hazen_williams_smooth_deriv(x[t.q], crate::math::HW_DELTA);
                }
            }
        }
    }
    val
}

/// Nonmonotone spectral projected gradient on the AL merit. Steps in the
/// range-scaled metric; returns iterations consumed.
#[allow(clippy::too_many_arguments)]
fn spg_inner(
    sys: &ConstraintSystem,
    scale: &Scaling,
    lo: &[Real],
    hi: &[Real],
    x: &mut Vec<Real>,
    lam: &[Real],
    rho: Real,
    omega: Real,
    cap: usize,
) -> usize {
    let n = x.len();
    let mut grad = vec![0.0; n];
    let mut f = al_eval(sys, scale, x, lam, rho, Some(&mut grad));
    let mut history = vec![f];
    let mut alpha: Real = 1.0;
    let mut prev_x: Option<Vec<Real>> = None;
    let mut prev_g: Option<Vec<Real>> = None;

    for it in 0..cap {
        // scaled projected-gradient stationarity measure
        let mut stat: Real = 0.0;
        for i in 0..n {
            let step = (x[i] - scale.var[i] * scale.var[i] * grad[i]).clamp(lo[i], hi[i]);
            stat = stat.max((step - x[i]).abs() / scale.var[i]);
        }
        if stat <= omega {
            return it + 1;
        }

        // BB step in the scaled metric
        if let (Some(px), Some(pg)) = (&prev_x, &prev_g) {
            let mut sy = 0.0;
            let mut ss = 0.0;
            for i in 0..n {
                let s = (x[i] - px[i]) / scale.var[i];
                let y = (grad[i] - pg[i]) * scale.var[i];
                sy += s * y;
                ss += s * s;
            }
            alpha = if sy > 1e-16 { (ss / sy).clamp(1e-8, 1e8) } else { 1e4 };
        }

        let mut d = vec![0.0; n];
        let mut gd = 0.0;
        for i in 0..n {
            let target = (x[i] - alpha * scale.var[i] * scale.var[i] * grad[i]).clamp(lo[i], hi[i]);
            d[i] = target - x[i];
            gd += grad[i] * d[i];
        }
        if gd >= 0.0 {
            // not a descent direction: fall back to a small safeguarded step
            alpha = 1e-4;
            gd = 0.0;
            for i in 0..n {
                let target =
                    (x[i] - alpha * scale.var[i] * scale.var[i] * grad[i]).clamp(lo[i], hi[i]);
                d[i] = target - x[i];
                gd += grad[i] * d[i];
            }
            if gd >= 0.0 {
                return it + 1;
            }
        }

        let f_ref = history.iter().cloned().fold(Real::NEG_INFINITY, Real::max);
        let mut beta: Real = 1.0;
        let mut xt = vec![0.0; n];
        let mut accepted = false;
        for _ in 0..40 {
            for i in 0..n {
                xt[i] = x[i] + beta * d[i];
            }
            let ft = al_eval(sys, scale, &xt, lam, rho, None);
            if ft <= f_ref + 1e-4 * beta * gd {
                let mut gt = vec![0.0; n];
                al_eval(sys, scale, &xt, lam, rho, Some(&mut gt));
                prev_x = Some(std::mem::take(x));
                prev_g = Some(std::mem::replace(&mut grad, gt));
                *x = xt.clone();
                f = ft;
                accepted = true;
                break;
            }
            beta *= 0.5;
            if beta < 1e-12 {
                break;
            }
        }
        if !accepted {
            return it + 1;
        }
        history.push(f);
        if history.len() > 10 {
            history.remove(0);
        }
    }
    cap
}

/// Least-squares merit of the active exact-form rows: equalities plus
/// violated inequalities, row-scaled.
fn polish_merit(sys: &ConstraintSystem, scale: &Scaling, x: &[Real]) -> Real {
    let mut m = 0.0;
    for (j, r) in sys.residuals.iter().enumerate() {
        let v = r.expr.eval(x, EvalMode::Exact);
        let v = match r.kind {
            ResidualKind::Eq => v,
            ResidualKind::Le => v.max(0.0),
        };
        let s = v * scale.row[j];
        m += s * s;
    }
    m
}

/// Damped Gauss-Newton projection onto the exact constraint manifold:
/// drives equality residuals and violated inequalities to zero while
/// clamping into the variable box. Linear balance rows converge essentially
/// to machine precision, which is what the tight feasibility checks rely
/// on.
fn gauss_newton_polish(
    sys: &ConstraintSystem,
    scale: &Scaling,
    lo: &[Real],
    hi: &[Real],
    x: &mut Vec<Real>,
) {
    let n = x.len();
    if n == 0 {
        return;
    }
    let free: Vec<usize> = (0..n).filter(|&i| hi[i] - lo[i] > 1e-12).collect();
    if free.is_empty() {
        return;
    }
    let col_of: BTreeMap<usize, usize> = free.iter().enumerate().map(|(c, &v)| (v, c)).collect();
    let nf = free.len();
    let mut nu: Real = 1e-12;

    for _ in 0..60 {
        if exact_violation(sys, x) <= 1e-11 {
            return;
        }

        // collect active rows once per outer iteration
        let mut rows: Vec<(usize, Real)> = Vec::new();
        for (j, r) in sys.residuals.iter().enumerate() {
            let v = r.expr.eval(x, EvalMode::Exact);
            match r.kind {
                ResidualKind::Eq => rows.push((j, v)),
                ResidualKind::Le if v > 1e-13 => rows.push((j, v)),
                ResidualKind::Le => {}
            }
        }
        if rows.is_empty() {
            return;
        }

        // active-set rounds: drop variables whose correction is blocked by
        // their bound, so the remaining step is an untruncated Newton step
        let mut participating = vec![true; nf];
        let mut d = DVector::<Real>::zeros(nf);
        for _round in 0..6 {
            let mut ata = DMatrix::<Real>::zeros(nf, nf);
            let mut atb = DVector::<Real>::zeros(nf);
            for &(j, v) in &rows {
                let w = scale.row[j];
                let entries: Vec<(usize, Real)> = sys.residuals[j]
                    .expr
                    .gradient(x, EvalMode::Exact)
                    .into_iter()
                    .filter_map(|(var, dv)| {
                        col_of.get(&var).filter(|&&c| participating[c]).map(|&c| (c, dv * w))
                    })
                    .collect();
                let rv = v * w;
                for &(ci, di) in &entries {
                    atb[ci] -= di * rv;
                    for &(cj, dj) in &entries {
                        ata[(ci, cj)] += di * dj;
                    }
                }
            }
            for i in 0..nf {
                ata[(i, i)] += nu * (1.0 + ata[(i, i)]) + if participating[i] { 0.0 } else { 1.0 };
            }
            let Some(chol) = ata.cholesky() else {
                nu = (nu * 100.0).max(1e-10);
                break;
            };
            d = chol.solve(&atb);
            let mut changed = false;
            for (c, &v) in free.iter().enumerate() {
                if !participating[c] {
                    d[c] = 0.0;
                    continue;
                }
                let blocked_low = x[v] - lo[v] <= 1e-12 && d[c] < 0.0;
                let blocked_high = hi[v] - x[v] <= 1e-12 && d[c] > 0.0;
                if blocked_low || blocked_high {
                    participating[c] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let before = polish_merit(sys, scale, x);
        let mut beta: Real = 1.0;
        let mut improved = false;
        for _ in 0..25 {
            let mut xt = x.clone();
            for (c, &v) in free.iter().enumerate() {
                xt[v] = (xt[v] + beta * d[c]).clamp(lo[v], hi[v]);
            }
            let after = polish_merit(sys, scale, &xt);
            if after < before * (1.0 - 1e-4 * beta) {
                *x = xt;
                improved = true;
                break;
            }
            beta *= 0.5;
        }
        if improved {
            nu = (nu * 0.25).max(1e-14);
        } else {
            nu *= 100.0;
            if nu > 1e6 {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlp::{Expr, SystemBuilder};

    /// max y s.t. x + y = 1, x^2 <= 0.25 on [-1,1]^2 -> x=-0.5, y=1.5 capped
    /// by bounds to y<=1 ... use wider box so optimum is interior-ish.
    fn toy() -> ConstraintSystem {
        let mut b = SystemBuilder::new();
        let x = b.vars.add("x".into(), -1.0, 1.0);
        let y = b.vars.add("y".into(), -2.0, 2.0);
        let mut e = Expr::with_constant(-1.0);
        e.add_lin(x, 1.0).add_lin(y, 1.0);
        b.add_eq("sum", "1".into(), e);
        let mut q = Expr::with_constant(-0.25);
        q.add_quad(x, x, 1.0);
        b.add_le("cap", "x2".into(), q);
        b.objective.add_lin(y, 1.0);
        b.finish()
    }

    #[test]
    fn solves_simple_equality_constrained_lp() {
        let sys = toy();
        let cfg = SolverConfig::default();
        let out = solve_relaxation(&sys, &BTreeMap::new(), None, &cfg, 0);
        assert_eq!(out.status, SubStatus::Solved);
        // optimum: x = -0.5 (at the quadratic cap), y = 1.5
        assert!((out.x[0] + 0.5).abs() < 1e-5, "x = {}", out.x[0]);
        assert!((out.objective - 1.5).abs() < 1e-5, "obj = {}", out.objective);
        assert!(out.violation <= 1e-8);
    }

    #[test]
    fn detects_box_infeasible_linear_row() {
        let mut b = SystemBuilder::new();
        let x = b.vars.add("x".into(), 0.0, 1.0);
        let mut e = Expr::with_constant(2.0);
        e.add_lin(x, 1.0); // x + 2 = 0 impossible on [0,1]
        b.add_eq("bad", "".into(), e);
        let sys = b.finish();
        let out = solve_relaxation(&sys, &BTreeMap::new(), None, &SolverConfig::default(), 0);
        assert_eq!(out.status, SubStatus::Infeasible);
    }

    #[test]
    fn respects_fixed_assignments() {
        let sys = toy();
        let mut fixed = BTreeMap::new();
        fixed.insert(0usize, 0.25);
        let out = solve_relaxation(&sys, &fixed, None, &SolverConfig::default(), 0);
        assert_eq!(out.status, SubStatus::Solved);
        assert!((out.x[0] - 0.25).abs() < 1e-12);
        assert!((out.objective - 0.75).abs() < 1e-5);
    }
}
