//! Instance resolution and system assembly.
//!
//! Entities are sorted by id, expandable tanks get their synthetic
//! attachment node and gated short pipe, and every decision variable is
//! registered in a deterministic order before the constraint families are
//! emitted. Two assemblies of the same instance produce identical residual
//! ordering and values.

use super::system::{ConstraintSystem, SystemBuilder};
use super::vars::BinClass;
use super::{names, Expr};
use crate::model::{
    Candidate, CandidateKind, JointNetwork, Phase, Tank, ValidationReport,
};
use crate::{coupling, math, power, water, Real};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct AssembleOptions {
    /// Per-interval cap on each pump's electrical draw (MW). Used by the
    /// independent-planning baseline when the power network is absent.
    pub pump_power_cap: Option<Real>,
    /// Normalize each objective term by its horizon-peak offered demand
    /// before weighting. Off by default; the raw objective mixes MW and L/s.
    pub normalize_objective: bool,
}

/// Assembles the full joint MINLP. Rejects invalid instances with their
/// validation report.
pub fn assemble(net: &JointNetwork) -> Result<ConstraintSystem, ValidationReport> {
    assemble_with(net, &AssembleOptions::default())
}

pub fn assemble_with(
    net: &JointNetwork,
    opts: &AssembleOptions,
) -> Result<ConstraintSystem, ValidationReport> {
    let report = net.validate();
    if !report.is_clean() {
        return Err(report);
    }

    let mut b = SystemBuilder::new();
    let ctx = Ctx::resolve(net, opts);

    // Expansion binaries first: their indices double as candidate identity
    // in plans and oracle enumeration.
    let mut xvars: BTreeMap<(CandidateKind, String), usize> = BTreeMap::new();
    for c in &ctx.candidates {
        let idx = b.vars.add_binary(names::x(c.kind, &c.id), BinClass::Expansion);
        xvars.insert((c.kind, c.id.clone()), idx);
    }
    let ctx = CtxX { ctx, xvars };

    let playout = power::register(&mut b, &ctx);
    let wlayout = water::register(&mut b, &ctx);

    power::emit(&mut b, &ctx, &playout);
    water::emit(&mut b, &ctx, &wlayout, opts.pump_power_cap);
    coupling::emit(&mut b, &ctx, &playout, &wlayout, opts.normalize_objective);

    Ok(b.finish())
}

/// Resolved, index-based view of an instance. Entity vectors are sorted by
/// id; junction and edge lists include the synthetic tank attachments.
pub(crate) struct Ctx<'a> {
    pub net: &'a JointNetwork,
    /// Interval count K'.
    pub ki: usize,
    /// Point count K.
    pub kp: usize,
    pub steps: Vec<Real>,
    pub candidates: Vec<Candidate>,

    pub buses: Vec<&'a crate::model::Bus>,
    pub bus_pos: BTreeMap<&'a str, usize>,
    pub branches: Vec<&'a crate::model::Branch>,
    pub gens: Vec<&'a crate::model::Generator>,
    pub storages: Vec<&'a crate::model::Storage>,
    pub loads: Vec<&'a crate::model::PowerLoad>,

    pub junctions: Vec<JuncInfo>,
    pub edges: Vec<EdgeInfo>,
    pub pumps: Vec<&'a crate::model::Pump>,
    /// Edge index of each pump, aligned with `pumps`.
    pub pump_edge: Vec<usize>,
    pub tanks: Vec<TankInfo<'a>>,
    pub demands: Vec<(&'a crate::model::WaterDemand, usize)>,
    pub reservoirs: Vec<(&'a crate::model::Reservoir, usize)>,
}

/// `Ctx` plus the registered expansion binaries.
pub(crate) struct CtxX<'a> {
    pub ctx: Ctx<'a>,
    pub xvars: BTreeMap<(CandidateKind, String), usize>,
}

impl<'a> std::ops::Deref for CtxX<'a> {
    type Target = Ctx<'a>;
    fn deref(&self) -> &Ctx<'a> {
        &self.ctx
    }
}

impl<'a> CtxX<'a> {
    pub fn xvar(&self, kind: CandidateKind, id: &str) -> Option<usize> {
        self.xvars.get(&(kind, id.to_string())).copied()
    }
}

/// A water node after resolution: effective head bounds per time point
/// (reservoirs pin theirs) and the base elevation.
pub(crate) struct JuncInfo {
    pub id: String,
    pub head_lo: Vec<Real>,
    pub head_hi: Vec<Real>,
}

pub(crate) enum EdgeKind {
    Pipe {
        /// Combined `length * resistance` friction factor.
        lr: Real,
        q_lo: Real,
        q_hi: Real,
        /// Expansion binary gating this pipe, if any. Synthetic tank pipes
        /// share the tank's binary.
        x: Option<usize>,
    },
    Pump {
        /// Position in `ctx.pumps`.
        pos: usize,
    },
}

pub(crate) struct EdgeInfo {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

pub(crate) struct TankInfo<'a> {
    pub tank: &'a Tank,
    /// Junction the tank level couples to (the synthetic node when
    /// expandable).
    pub junction: usize,
    /// Base elevation in the volume-level relation.
    pub base: Real,
    /// Exchange-rate bound (L/s), sized so the whole tank can turn over in
    /// the shortest interval.
    pub rate: Real,
}

impl<'a> Ctx<'a> {
    fn resolve(net: &'a JointNetwork, _opts: &AssembleOptions) -> Self {
        let ki = net.time_grid.n_intervals();
        let kp = net.time_grid.n_points();
        let steps = net.time_grid.steps().to_vec();
        let candidates = net.expansion_candidates();

        let mut buses: Vec<_> = net.power.buses.iter().collect();
        buses.sort_by(|a, b| a.id.cmp(&b.id));
        let bus_pos: BTreeMap<&str, usize> =
            buses.iter().enumerate().map(|(i, b)| (b.id.as_str(), i)).collect();
        let mut branches: Vec<_> = net.power.branches.iter().collect();
        branches.sort_by(|a, b| a.id.cmp(&b.id));
        let mut gens: Vec<_> = net.power.generators.iter().collect();
        gens.sort_by(|a, b| a.id.cmp(&b.id));
        let mut storages: Vec<_> = net.power.storages.iter().collect();
        storages.sort_by(|a, b| a.id.cmp(&b.id));
        let mut loads: Vec<_> = net.power.loads.iter().collect();
        loads.sort_by(|a, b| a.id.cmp(&b.id));

        // Real junctions, sorted; reservoirs pin their junction's head.
        let mut sorted_j: Vec<_> = net.water.junctions.iter().collect();
        sorted_j.sort_by(|a, b| a.id.cmp(&b.id));
        let mut junctions: Vec<JuncInfo> = sorted_j
            .iter()
            .map(|j| JuncInfo {
                id: j.id.clone(),
                head_lo: j.head_min.series(kp),
                head_hi: j.head_max.series(kp),
            })
            .collect();
        let mut junc_pos: BTreeMap<String, usize> =
            junctions.iter().enumerate().map(|(i, j)| (j.id.clone(), i)).collect();
        let mut sorted_res: Vec<_> = net.water.reservoirs.iter().collect();
        sorted_res.sort_by(|a, b| a.id.cmp(&b.id));
        for r in &sorted_res {
            let ji = junc_pos[&r.junction];
            for t in 0..kp {
                junctions[ji].head_lo[t] = r.head;
                junctions[ji].head_hi[t] = r.head;
            }
        }

        // Tanks: existing ones couple to their junction directly; expandable
        // ones get a synthetic node plus a gated short pipe.
        let min_dt = net.time_grid.min_step();
        let mut sorted_tanks: Vec<_> = net.water.tanks.iter().collect();
        sorted_tanks.sort_by(|a, b| a.id.cmp(&b.id));

        let mut edges: Vec<EdgeInfo> = Vec::new();
        let mut sorted_pipes: Vec<_> = net.water.pipes.iter().collect();
        sorted_pipes.sort_by(|a, b| a.id.cmp(&b.id));
        let mut sorted_pumps: Vec<_> = net.water.pumps.iter().collect();
        sorted_pumps.sort_by(|a, b| a.id.cmp(&b.id));

        let mut tanks = Vec::new();
        for t in &sorted_tanks {
            let parent = junc_pos[&t.junction];
            let base = t.base_elevation.unwrap_or_else(|| junction_elevation(net, &t.junction));
            let rate = (t.volume_max / (math::LPS_HOUR_TO_M3 * min_dt)).max(1.0);
            if t.expandable {
                let node_id = names::tank_node(&t.id);
                let ji = junctions.len();
                junctions.push(JuncInfo {
                    id: node_id.clone(),
                    head_lo: vec![base; kp],
                    head_hi: vec![base + t.volume_max / t.area; kp],
                });
                junc_pos.insert(node_id, ji);
                tanks.push(TankInfo { tank: t, junction: ji, base, rate });
            } else {
                tanks.push(TankInfo { tank: t, junction: parent, base, rate });
            }
        }

        for p in &sorted_pipes {
            edges.push(EdgeInfo {
                id: p.id.clone(),
                from: junc_pos[&p.from],
                to: junc_pos[&p.to],
                kind: EdgeKind::Pipe { lr: p.length * p.resistance, q_lo: p.q_min, q_hi: p.q_max, x: None },
            });
        }
        let mut pump_edge = Vec::new();
        for (pos, p) in sorted_pumps.iter().enumerate() {
            pump_edge.push(edges.len());
            edges.push(EdgeInfo {
                id: p.id.clone(),
                from: junc_pos[&p.from],
                to: junc_pos[&p.to],
                kind: EdgeKind::Pump { pos },
            });
        }
        // Synthetic tank pipes; expansion binaries are patched in by
        // `attach_tank_gates` once the x variables exist.
        for t in &tanks {
            if t.tank.expandable {
                let parent = junc_pos[&t.tank.junction];
                edges.push(EdgeInfo {
                    id: names::tank_pipe(&t.tank.id),
                    from: parent,
                    to: t.junction,
                    kind: EdgeKind::Pipe {
                        lr: water::TANK_PIPE_LR,
                        q_lo: -t.rate,
                        q_hi: t.rate,
                        x: None,
                    },
                });
            }
        }

        let mut demands: Vec<_> = net.water.demands.iter().collect();
        demands.sort_by(|a, b| a.id.cmp(&b.id));
        let demands = demands.into_iter().map(|d| (d, junc_pos[&d.junction])).collect();
        let reservoirs = sorted_res.into_iter().map(|r| (r, junc_pos[&r.junction])).collect();

        Ctx {
            net,
            ki,
            kp,
            steps,
            candidates,
            buses,
            bus_pos,
            branches,
            gens,
            storages,
            loads,
            junctions,
            edges,
            pumps: sorted_pumps,
            pump_edge,
            tanks,
            demands,
            reservoirs,
        }
    }

    pub fn phases_of_bus(&self, bus: usize) -> &[Phase] {
        &self.buses[bus].phases
    }
}

fn junction_elevation(net: &JointNetwork, id: &str) -> Real {
    net.water
        .junctions
        .iter()
        .find(|j| j.id == id)
        .map(|j| j.elevation)
        .unwrap_or(0.0)
}

impl<'a> CtxX<'a> {
    /// Expansion binary gating an edge, if the edge is expandable. Synthetic
    /// tank pipes are gated by their tank's binary.
    pub(crate) fn edge_gate(&self, edge: &EdgeInfo) -> Option<usize> {
        if let Some(t) = self.tanks.iter().find(|t| names::tank_pipe(&t.tank.id) == edge.id) {
            return self.xvar(CandidateKind::Tank, &t.tank.id);
        }
        match &edge.kind {
            EdgeKind::Pipe { .. } => self
                .net
                .water
                .pipes
                .iter()
                .find(|p| p.id == edge.id && p.expandable)
                .and_then(|p| self.xvar(CandidateKind::Pipe, &p.id)),
            EdgeKind::Pump { pos } => {
                let p = self.pumps[*pos];
                if p.expandable {
                    self.xvar(CandidateKind::Pump, &p.id)
                } else {
                    None
                }
            }
        }
    }
}

/// Builds the budget constraint expression `sum c_i x_i - B`.
pub(crate) fn budget_expr(ctx: &CtxX) -> Option<Expr> {
    if ctx.candidates.is_empty() {
        return None;
    }
    let mut e = Expr::with_constant(-ctx.net.budget);
    for c in &ctx.candidates {
        let x = ctx.xvar(c.kind, &c.id).expect("candidate has an x variable");
        e.add_lin(x, c.cost);
    }
    Some(e)
}
