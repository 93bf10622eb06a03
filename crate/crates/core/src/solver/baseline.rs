//! Independent-planning baseline: expand the water network alone with a
//! fixed power allowance for pumping, and the power network alone with the
//! pump-interface load pinned at that allowance. Used for the
//! joint-vs-independent comparison.

use super::bnb::solve_system;
use super::oracle::enumerate_oracle_with;
use super::{SolveError, Solution, SolverConfig};
use crate::model::{JointNetwork, PowerSection, Profile, WaterSection};
use crate::nlp::assemble::AssembleOptions;
use crate::nlp::{assemble_with, names};
use crate::Real;
use serde::Serialize;
use std::collections::BTreeMap;

/// Strips the instance to its water side, with each pump's electrical draw
/// capped per interval.
pub fn water_only(net: &JointNetwork) -> JointNetwork {
    let mut w = net.clone();
    w.power = PowerSection { base_mva: net.power.base_mva, ..Default::default() };
    w.links.clear();
    w.lambda = 0.0;
    w
}

/// Strips the instance to its power side, with every pump-interface load
/// pinned at `cap` MW (spread over its conductors).
pub fn power_only(net: &JointNetwork, cap: Real) -> JointNetwork {
    let mut p = net.clone();
    p.water = WaterSection::default();
    p.links.clear();
    p.lambda = 1.0;
    let base = p.power.base_mva;
    for load in &mut p.power.loads {
        if load.is_pump_interface {
            let per_phase = cap / base / load.phases.len() as Real;
            load.p_max = Profile::Constant(per_phase);
            load.p_min = Some(Profile::Constant(per_phase));
        }
    }
    p
}

/// Solves the two single-network expansion problems. The power side
/// maximizes served power demand with the pump load fixed at `cap`; the
/// water side maximizes served water demand with pump draw capped at `cap`
/// per interval. The instance budget applies to each network separately.
pub fn independent_baseline(
    net: &JointNetwork,
    cap: Real,
    cfg: &SolverConfig,
) -> Result<(Solution, Solution), SolveError> {
    let p = power_only(net, cap);
    let power_sol = enumerate_oracle_with(&p, cfg, &AssembleOptions::default())?;
    let w = water_only(net);
    let opts = AssembleOptions { pump_power_cap: Some(cap), ..Default::default() };
    let water_sol = enumerate_oracle_with(&w, cfg, &opts)?;
    Ok((power_sol, water_sol))
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanChoice {
    pub built: Vec<String>,
    pub cost: Real,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub power_target_mw: Real,
    pub water_target_lps: Real,
    pub pump_power_cap_mw: Real,
    pub joint: PlanChoice,
    pub independent_power: PlanChoice,
    pub independent_water: PlanChoice,
    pub independent_cost: Real,
    pub joint_cost_leq_independent: bool,
}

/// Pins the demand profiles as hard requirements: every load and water
/// demand must be served at its profile, with the peak-demand hour raised to
/// the given targets.
fn pin_targets(net: &mut JointNetwork, power_target: Option<Real>, water_target: Option<Real>) {
    let ki = net.time_grid.n_intervals();
    if let Some(wt) = water_target {
        // peak hour of the aggregate offered water demand
        let peak = peak_interval(
            ki,
            |k| net.water.demands.iter().map(|d| d.q_max.at(k)).sum::<Real>(),
        );
        let total: Real = net.water.demands.iter().map(|d| d.q_max.at(peak)).sum();
        for d in &mut net.water.demands {
            let mut series = d.q_max.series(ki);
            if total > 0.0 {
                series[peak] = wt * d.q_max.at(peak) / total;
            }
            d.q_max = Profile::Series(series.clone());
            d.q_min = Some(Profile::Series(series));
        }
    }
    if let Some(pt) = power_target {
        let base = net.power.base_mva;
        let peak = peak_interval(
            ki,
            |k| {
                net.power
                    .loads
                    .iter()
                    .filter(|l| !l.is_pump_interface)
                    .map(|l| l.p_max.at(k) * l.phases.len() as Real)
                    .sum::<Real>()
            },
        );
        let total: Real = net
            .power
            .loads
            .iter()
            .filter(|l| !l.is_pump_interface)
            .map(|l| l.p_max.at(peak) * l.phases.len() as Real)
            .sum();
        for l in &mut net.power.loads {
            if l.is_pump_interface {
                continue;
            }
            let mut series = l.p_max.series(ki);
            if total > 0.0 {
                series[peak] *= (pt / base) / total;
            }
            l.p_max = Profile::Series(series.clone());
            l.p_min = Some(Profile::Series(series));
        }
    }
}

fn peak_interval(ki: usize, f: impl Fn(usize) -> Real) -> usize {
    (0..ki)
        .max_by(|&a, &b| f(a).total_cmp(&f(b)))
        .unwrap_or(0)
}

/// Minimum-cost plan that can serve the pinned targets, found by enumerating
/// plans in (cost, lexicographic) order and checking feasibility.
fn min_cost_plan(
    net: &JointNetwork,
    cfg: &SolverConfig,
    opts: &AssembleOptions,
) -> Result<PlanChoice, SolveError> {
    let mut relaxed = net.clone();
    let candidates = relaxed.expansion_candidates();
    // the search controls x directly; make the budget row inactive
    relaxed.budget = candidates.iter().map(|c| c.cost).sum::<Real>() + 1.0;
    let sys = assemble_with(&relaxed, opts).map_err(SolveError::Invalid)?;
    let xvars: Vec<usize> = candidates
        .iter()
        .map(|c| sys.vars.index_of(&names::x(c.kind, &c.id)).expect("candidate variable"))
        .collect();
    let m = candidates.len();

    let mut plans: Vec<(Real, u64)> = (0u64..(1u64 << m))
        .map(|mask| {
            let cost: Real = (0..m)
                .filter(|i| (mask >> (m - 1 - i)) & 1 == 1)
                .map(|i| candidates[i].cost)
                .sum();
            (cost, mask)
        })
        .collect();
    plans.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    for (cost, mask) in plans {
        let fixed: BTreeMap<usize, Real> = (0..m)
            .map(|i| (xvars[i], ((mask >> (m - 1 - i)) & 1) as Real))
            .collect();
        if solve_system(&sys, &fixed, cfg).is_ok() {
            let built = (0..m)
                .filter(|i| (mask >> (m - 1 - i)) & 1 == 1)
                .map(|i| candidates[i].id.clone())
                .collect();
            return Ok(PlanChoice { built, cost });
        }
    }
    Err(SolveError::Infeasible)
}

/// Compares the cheapest joint plan against the cheapest independent plans
/// for serving elevated peak demands. Errors with
/// [`SolveError::Infeasible`] when a target cannot be met at any plan.
pub fn compare_joint_vs_independent(
    net: &JointNetwork,
    power_target: Real,
    water_target: Real,
    pump_power_cap: Real,
    cfg: &SolverConfig,
) -> Result<CompareReport, SolveError> {
    let mut joint_net = net.clone();
    pin_targets(&mut joint_net, Some(power_target), Some(water_target));
    let joint = min_cost_plan(&joint_net, cfg, &AssembleOptions::default())?;

    let mut pnet = power_only(net, pump_power_cap);
    pin_targets(&mut pnet, Some(power_target), None);
    let ind_power = min_cost_plan(&pnet, cfg, &AssembleOptions::default())?;

    let mut wnet = water_only(net);
    pin_targets(&mut wnet, None, Some(water_target));
    let opts = AssembleOptions { pump_power_cap: Some(pump_power_cap), ..Default::default() };
    let ind_water = min_cost_plan(&wnet, cfg, &opts)?;

    let independent_cost = ind_power.cost + ind_water.cost;
    Ok(CompareReport {
        power_target_mw: power_target,
        water_target_lps: water_target,
        pump_power_cap_mw: pump_power_cap,
        joint_cost_leq_independent: joint.cost <= independent_cost + 1e-12,
        joint,
        independent_power: ind_power,
        independent_water: ind_water,
        independent_cost,
    })
}
