//! Water-network constraint builders: head windows, flow gating,
//! Hazen-Williams friction, fixed-speed pump hydraulics, tanks, reservoirs,
//! demands, and junction flow conservation.
//!
//! Heads and tank volumes live on time points; flows, statuses, and served
//! demands on intervals. The hydraulic state over interval `k` references
//! the heads at point `k`.

use crate::model::CandidateKind;
use crate::nlp::assemble::{CtxX, EdgeKind};
use crate::nlp::system::SystemBuilder;
use crate::nlp::vars::BinClass;
use crate::nlp::{names, Expr};
use crate::{math, Real};

/// Friction factor `L*r` of the synthesized short pipe that attaches an
/// expandable tank (negligible loss at tank exchange rates).
pub(crate) const TANK_PIPE_LR: Real = 1e-6;

pub(crate) struct WaterLayout {
    /// `[junction][point]`, synthetic tank nodes included.
    pub h: Vec<Vec<usize>>,
    /// `[edge][interval]`, pipes then pumps then synthetic tank pipes.
    pub qe: Vec<Vec<usize>>,
    /// `[demand][interval]`
    pub qd: Vec<Vec<usize>>,
    /// `[reservoir][interval]`
    pub qr: Vec<Vec<usize>>,
    /// `[tank][interval]`, positive withdraws from the tank.
    pub qt: Vec<Vec<usize>>,
    /// `[tank][point]`
    pub vt: Vec<Vec<usize>>,
    /// `[pump][interval]`
    pub zp: Vec<Vec<usize>>,
    /// `[pump][interval]` head gain
    pub gp: Vec<Vec<usize>>,
}

pub(crate) fn register(b: &mut SystemBuilder, ctx: &CtxX) -> WaterLayout {
    let ki = ctx.ki;
    let kp = ctx.kp;

    let h = ctx
        .junctions
        .iter()
        .map(|j| {
            (0..kp)
                .map(|t| b.vars.add(names::h(&j.id, t), j.head_lo[t], j.head_hi[t]))
                .collect()
        })
        .collect();

    let qe = ctx
        .edges
        .iter()
        .map(|e| {
            let (lo, hi) = match &e.kind {
                EdgeKind::Pipe { q_lo, q_hi, x, .. } => {
                    if x.is_some() || ctx.edge_gate(e).is_some() {
                        (q_lo.min(0.0), q_hi.max(0.0))
                    } else {
                        (*q_lo, *q_hi)
                    }
                }
                EdgeKind::Pump { pos } => (0.0, ctx.pumps[*pos].q_max),
            };
            (0..ki).map(|k| b.vars.add(names::q(&e.id, k), lo, hi)).collect()
        })
        .collect();

    let qd = ctx
        .demands
        .iter()
        .map(|(d, _)| {
            (0..ki)
                .map(|k| {
                    let lo = d.q_min.as_ref().map(|p| p.at(k)).unwrap_or(0.0);
                    b.vars.add_hinted(names::qd(&d.id, k), lo, d.q_max.at(k), d.q_max.at(k))
                })
                .collect()
        })
        .collect();

    let qr = ctx
        .reservoirs
        .iter()
        .map(|(r, _)| (0..ki).map(|k| b.vars.add(names::qr(&r.id, k), 0.0, r.q_max)).collect())
        .collect();

    let mut qt = Vec::new();
    let mut vt = Vec::new();
    for t in &ctx.tanks {
        qt.push((0..ki).map(|k| b.vars.add(names::qt(&t.tank.id, k), -t.rate, t.rate)).collect());
        vt.push(
            (0..kp)
                .map(|p| {
                    if p == 0 {
                        b.vars.add(names::vt(&t.tank.id, p), t.tank.volume_init, t.tank.volume_init)
                    } else {
                        b.vars.add(names::vt(&t.tank.id, p), 0.0, t.tank.volume_max)
                    }
                })
                .collect(),
        );
    }

    let mut zp = Vec::new();
    let mut gp = Vec::new();
    for p in &ctx.pumps {
        zp.push((0..ki).map(|k| b.vars.add_binary(names::zp(&p.id, k), BinClass::PumpStatus)).collect());
        let gmax = pump_gain_max(p);
        gp.push((0..ki).map(|k| b.vars.add(names::gp(&p.id, k), 0.0, gmax)).collect());
    }

    WaterLayout { h, qe, qd, qr, qt, vt, zp, gp }
}

/// Upper bound of the head-gain curve over the active flow range.
fn pump_gain_max(p: &crate::model::Pump) -> Real {
    let mut g = p.head_c.max(p.head_gain(p.epsilon())).max(p.head_gain(p.q_max));
    if p.head_a < 0.0 {
        let vertex = -p.head_b / (2.0 * p.head_a);
        if vertex > 0.0 && vertex < p.q_max {
            g = g.max(p.head_gain(vertex));
        }
    }
    g
}

/// Lower envelope of the gain curve on the active range, floored at zero;
/// used only to widen the off-state decoupling constant.
fn pump_gain_min(p: &crate::model::Pump) -> Real {
    0.0f64.min(p.head_gain(p.epsilon())).min(p.head_gain(p.q_max))
}

pub(crate) fn emit(b: &mut SystemBuilder, ctx: &CtxX, lay: &WaterLayout, pump_power_cap: Option<Real>) {
    let ki = ctx.ki;
    let kp = ctx.kp;

    // pipes: friction law, gated for expandable edges
    for (ei, e) in ctx.edges.iter().enumerate() {
        let EdgeKind::Pipe { lr, q_lo, q_hi, .. } = &e.kind else { continue };
        let gate = ctx.edge_gate(e);
        for k in 0..ki {
            let (hi_var, hj_var) = (lay.h[e.from][k], lay.h[e.to][k]);
            let q = lay.qe[ei][k];
            match gate {
                None => {
                    let mut ex = Expr::new();
                    ex.add_lin(hi_var, 1.0).add_lin(hj_var, -1.0).add_hw(q, -lr);
                    b.add_eq("pipe-headloss", format!("{}.k{}", e.id, k), ex);
                }
                Some(x) => {
                    // x (h_i - h_j) = L r q|q|^0.852: built pipes obey the
                    // friction law, unbuilt ones decouple the heads
                    let mut ex = Expr::new();
                    ex.add_quad(x, hi_var, 1.0).add_quad(x, hj_var, -1.0).add_hw(q, -lr);
                    b.add_eq("pipe-headloss-gated", format!("{}.k{}", e.id, k), ex);

                    let mut up = Expr::new();
                    up.add_lin(lay.qe[ei][k], 1.0).add_lin(x, -q_hi.max(0.0));
                    b.add_le("flow-gate", format!("{}.k{}.hi", e.id, k), up);
                    let mut dn = Expr::new();
                    dn.add_lin(x, q_lo.min(0.0)).add_lin(lay.qe[ei][k], -1.0);
                    b.add_le("flow-gate", format!("{}.k{}.lo", e.id, k), dn);
                }
            }
        }
    }

    // pumps: activation window, concave head gain, off-state decoupling
    for (pi, p) in ctx.pumps.iter().enumerate() {
        let edge = &ctx.edges[ctx.pump_edge[pi]];
        let x = if p.expandable { ctx.xvar(CandidateKind::Pump, &p.id) } else { None };
        // decoupling constant from declared head bounds and the gain range
        let (from_j, to_j) = (&ctx.junctions[edge.from], &ctx.junctions[edge.to]);
        let mut m: Real = 0.0;
        for t in 0..kp {
            m = m.max(to_j.head_hi[t] - from_j.head_lo[t]).max(from_j.head_hi[t] - to_j.head_lo[t]);
        }
        let m = m - pump_gain_min(p);

        for k in 0..ki {
            let q = lay.qe[ctx.pump_edge[pi]][k];
            let (z, g) = (lay.zp[pi][k], lay.gp[pi][k]);
            let label = format!("{}.k{}", p.id, k);

            let mut lo = Expr::new();
            lo.add_lin(z, p.epsilon()).add_lin(q, -1.0);
            b.add_le("pump-flow-gate", format!("{label}.lo"), lo);
            let mut up = Expr::new();
            up.add_lin(q, 1.0).add_lin(z, -p.q_max);
            b.add_le("pump-flow-gate", format!("{label}.hi"), up);

            let mut gain = Expr::new();
            gain.add_quad(q, q, p.head_a).add_lin(q, p.head_b).add_lin(z, p.head_c).add_lin(g, -1.0);
            b.add_eq("pump-head-gain", label.clone(), gain);

            // -M(1-z) <= h_to - h_from - G <= M(1-z)
            let (hf, ht) = (lay.h[edge.from][k], lay.h[edge.to][k]);
            let mut hi_side = Expr::with_constant(-m);
            hi_side.add_lin(ht, 1.0).add_lin(hf, -1.0).add_lin(g, -1.0).add_lin(z, m);
            b.add_le("pump-head-link", format!("{label}.hi"), hi_side);
            let mut lo_side = Expr::with_constant(-m);
            lo_side.add_lin(ht, -1.0).add_lin(hf, 1.0).add_lin(g, 1.0).add_lin(z, m);
            b.add_le("pump-head-link", format!("{label}.lo"), lo_side);

            if let Some(x) = x {
                let mut e = Expr::new();
                e.add_lin(z, 1.0).add_lin(x, -1.0);
                b.add_le("expansion-gate", label.clone(), e);
            }

            if let Some(cap) = pump_power_cap {
                let mut e = Expr::with_constant(-cap);
                e.add_lin(q, p.power_alpha).add_lin(z, p.power_mu);
                b.add_le("pump-power-cap", label, e);
            }
        }
    }

    // tanks: level relation, volume recursion, end-of-horizon recovery
    for (ti, t) in ctx.tanks.iter().enumerate() {
        let area = t.tank.area;
        for p in 0..kp {
            let mut level = Expr::with_constant(area * t.base);
            level.add_lin(lay.vt[ti][p], 1.0).add_lin(lay.h[t.junction][p], -area);
            b.add_eq("tank-level", format!("{}.t{}", t.tank.id, p), level);
        }
        for k in 0..ki {
            let mut vol = Expr::new();
            vol.add_lin(lay.vt[ti][k + 1], 1.0)
                .add_lin(lay.vt[ti][k], -1.0)
                .add_lin(lay.qt[ti][k], math::LPS_HOUR_TO_M3 * ctx.steps[k]);
            b.add_eq("tank-volume", format!("{}.k{}", t.tank.id, k), vol);
        }
        let mut rec = Expr::new();
        rec.add_lin(lay.vt[ti][0], 1.0).add_lin(lay.vt[ti][kp - 1], -1.0);
        b.add_le("tank-recovery", t.tank.id.clone(), rec);
    }

    // flow conservation at every junction: net inflow balances demands minus
    // reservoir and tank injections
    for (ji, j) in ctx.junctions.iter().enumerate() {
        for k in 0..ki {
            let mut e = Expr::new();
            for (ei, edge) in ctx.edges.iter().enumerate() {
                if edge.to == ji {
                    e.add_lin(lay.qe[ei][k], 1.0);
                }
                if edge.from == ji {
                    e.add_lin(lay.qe[ei][k], -1.0);
                }
            }
            for (di, (_, dj)) in ctx.demands.iter().enumerate() {
                if *dj == ji {
                    e.add_lin(lay.qd[di][k], -1.0);
                }
            }
            for (ri, (_, rj)) in ctx.reservoirs.iter().enumerate() {
                if *rj == ji {
                    e.add_lin(lay.qr[ri][k], 1.0);
                }
            }
            for (ti, t) in ctx.tanks.iter().enumerate() {
                if t.junction == ji {
                    e.add_lin(lay.qt[ti][k], 1.0);
                }
            }
            if !e.lin.is_empty() {
                b.add_eq("flow-conservation", format!("{}.k{}", j.id, k), e);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::math;

    #[test]
    fn hazen_williams_antisymmetric() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let q: f64 = rng.gen_range(-500.0..500.0);
            let f = math::hazen_williams(q);
            let g = math::hazen_williams(-q);
            assert!((f + g).abs() <= 1e-12 * f.abs().max(1.0));
        }
    }

    #[test]
    fn hazen_williams_strictly_increasing_for_positive_flow() {
        let mut prev = 0.0;
        for i in 1..1000 {
            let q = i as f64 * 0.5;
            let v = math::hazen_williams(q);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn pump_gain_concavity_and_floor() {
        // curvature 2a < 0 and positive gain at minimum active flow
        let p = crate::model::Pump {
            id: "p".into(),
            from: "a".into(),
            to: "b".into(),
            head_a: -1e-4,
            head_b: 0.0,
            head_c: 40.0,
            min_flow: None,
            q_max: 420.0,
            power_alpha: 2.5e-4,
            power_mu: 0.0375,
            expandable: true,
            cost: 0.0,
        };
        assert!(2.0 * p.head_a < 0.0);
        assert!(p.head_gain(p.epsilon()) > 0.0);
        let g = p.head_gain(2.0);
        assert!((g - (40.0 - 1e-4 * 4.0)).abs() < 1e-12);
    }
}
