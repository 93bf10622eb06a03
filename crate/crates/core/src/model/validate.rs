//! Instance validation. Every failed invariant is reported with the entity
//! id and a stable rule name; nothing short-circuits, so one pass surfaces
//! all problems.

use super::{JointNetwork, Phase, Profile};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, entity: &str, rule: &str, detail: String) {
        self.violations.push(Violation {
            entity: entity.to_string(),
            rule: rule.to_string(),
            detail,
        });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_clean() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{}: {} ({})", v.entity, v.rule, v.detail)?;
        }
        Ok(())
    }
}

fn check_profile(
    rep: &mut ValidationReport,
    entity: &str,
    field: &str,
    p: &Profile,
    n: usize,
    per: &str,
) {
    if !p.fits(n) {
        rep.push(
            entity,
            "profile length mismatch",
            format!("{field} must resolve to {n} entries (per {per})"),
        );
    }
}

fn duplicate_ids<'a>(ids: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut dup = Vec::new();
    for id in ids {
        if !seen.insert(id) {
            dup.push(id.to_string());
        }
    }
    dup
}

pub fn validate(net: &JointNetwork) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let ki = net.time_grid.n_intervals();
    let kp = net.time_grid.n_points();

    if net.format != super::FORMAT_TAG {
        rep.push("instance", "unknown format tag", net.format.clone());
    }
    if !(net.budget >= 0.0) {
        rep.push("instance", "budget negative", format!("{}", net.budget));
    }
    if !(0.0..=1.0).contains(&net.lambda) {
        rep.push("instance", "lambda out of [0,1]", format!("{}", net.lambda));
    }

    // -------- power section --------
    let pw = &net.power;
    if !pw.buses.is_empty() && !(pw.base_mva > 0.0) {
        rep.push("power", "base MVA not positive", format!("{}", pw.base_mva));
    }
    for id in duplicate_ids(
        pw.buses
            .iter()
            .map(|b| b.id.as_str())
            .chain(pw.branches.iter().map(|b| b.id.as_str()))
            .chain(pw.generators.iter().map(|g| g.id.as_str()))
            .chain(pw.storages.iter().map(|s| s.id.as_str()))
            .chain(pw.loads.iter().map(|l| l.id.as_str())),
    ) {
        rep.push(&id, "duplicate id", "power section".into());
    }

    let bus_phases: BTreeMap<&str, BTreeSet<Phase>> = pw
        .buses
        .iter()
        .map(|b| (b.id.as_str(), b.phases.iter().cloned().collect()))
        .collect();

    let sources = pw.buses.iter().filter(|b| b.source).count();
    if !pw.buses.is_empty() && sources != 1 {
        rep.push("power", "source bus count", format!("expected 1, found {sources}"));
    }

    for b in &pw.buses {
        if b.phases.is_empty() {
            rep.push(&b.id, "bus has no phases", String::new());
        }
        check_profile(&mut rep, &b.id, "vmin", &b.vmin, ki, "interval");
        check_profile(&mut rep, &b.id, "vmax", &b.vmax, ki, "interval");
        for k in 0..ki {
            let (lo, hi) = (b.vmin.at(k), b.vmax.at(k));
            if !(lo > 0.0 && lo <= hi) {
                rep.push(
                    &b.id,
                    "voltage bounds out of order",
                    format!("interval {k}: need 0 < vmin <= vmax, got [{lo}, {hi}]"),
                );
                break;
            }
        }
    }

    let check_bus_ref = |rep: &mut ValidationReport, entity: &str, bus: &str| {
        if !bus_phases.contains_key(bus) {
            rep.push(entity, "unknown bus", bus.to_string());
            false
        } else {
            true
        }
    };
    let check_phases = |rep: &mut ValidationReport, entity: &str, bus: &str, ph: &[Phase]| {
        if let Some(set) = bus_phases.get(bus) {
            if ph.is_empty() {
                rep.push(entity, "no phases declared", String::new());
            }
            for p in ph {
                if !set.contains(p) {
                    rep.push(entity, "phase not present at bus", format!("{p:?} at {bus}"));
                }
            }
        }
    };

    for br in &pw.branches {
        check_bus_ref(&mut rep, &br.id, &br.from_bus);
        check_bus_ref(&mut rep, &br.id, &br.to_bus);
        check_phases(&mut rep, &br.id, &br.from_bus, &br.phases);
        check_phases(&mut rep, &br.id, &br.to_bus, &br.phases);
        let n = br.phases.len();
        let square = |m: &Vec<Vec<_>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&br.y) {
            rep.push(&br.id, "admittance dimension mismatch", format!("expected {n}x{n}"));
        }
        for yc in [&br.yc_from, &br.yc_to] {
            if !yc.is_empty() && !square(yc) {
                rep.push(&br.id, "shunt admittance dimension mismatch", format!("expected {n}x{n}"));
            }
        }
        if let Some(s) = &br.s_max {
            check_profile(&mut rep, &br.id, "s_max", s, ki, "interval");
            if s.min_over(ki) < 0.0 {
                rep.push(&br.id, "thermal limit negative", String::new());
            }
        }
    }

    for g in &pw.generators {
        check_bus_ref(&mut rep, &g.id, &g.bus);
        check_phases(&mut rep, &g.id, &g.bus, &g.phases);
        for (f, p) in [("p_min", &g.p_min), ("p_max", &g.p_max), ("q_min", &g.q_min), ("q_max", &g.q_max)] {
            check_profile(&mut rep, &g.id, f, p, ki, "interval");
        }
        for k in 0..ki {
            if g.p_min.at(k) > g.p_max.at(k) || g.q_min.at(k) > g.q_max.at(k) {
                rep.push(&g.id, "injection bounds out of order", format!("interval {k}"));
                break;
            }
        }
        if g.cost < 0.0 {
            rep.push(&g.id, "cost negative", format!("{}", g.cost));
        }
    }

    for s in &pw.storages {
        check_bus_ref(&mut rep, &s.id, &s.bus);
        if s.s_rating < 0.0 || s.p_charge_max < 0.0 || s.p_discharge_max < 0.0 || s.energy_max < 0.0 {
            rep.push(&s.id, "storage caps negative", String::new());
        }
        for eta in [s.eta_charge, s.eta_discharge] {
            if !(eta > 0.0 && eta <= 1.0) {
                rep.push(&s.id, "efficiency out of (0,1]", format!("{eta}"));
            }
        }
        if !(0.0 <= s.energy_init && s.energy_init <= s.energy_max) {
            rep.push(&s.id, "initial energy out of range", format!("{}", s.energy_init));
        }
        if s.cost < 0.0 {
            rep.push(&s.id, "cost negative", format!("{}", s.cost));
        }
    }

    let mut link_count: BTreeMap<&str, usize> = BTreeMap::new();
    for l in &net.links {
        *link_count.entry(l.load.as_str()).or_default() += 1;
    }

    for d in &pw.loads {
        check_bus_ref(&mut rep, &d.id, &d.bus);
        check_phases(&mut rep, &d.id, &d.bus, &d.phases);
        check_profile(&mut rep, &d.id, "p_max", &d.p_max, ki, "interval");
        if d.p_max.min_over(ki) < 0.0 {
            rep.push(&d.id, "demand negative", String::new());
        }
        if let Some(pm) = &d.p_min {
            check_profile(&mut rep, &d.id, "p_min", pm, ki, "interval");
            for k in 0..ki {
                if pm.at(k) > d.p_max.at(k) + 1e-12 {
                    rep.push(&d.id, "demand floor above cap", format!("interval {k}"));
                    break;
                }
            }
        }
        if d.is_pump_interface && link_count.get(d.id.as_str()).copied().unwrap_or(0) != 1 {
            rep.push(
                &d.id,
                "pump-interface load link count",
                "exactly one link must target this load".into(),
            );
        }
    }

    // -------- water section --------
    let wt = &net.water;
    for id in duplicate_ids(
        wt.junctions
            .iter()
            .map(|j| j.id.as_str())
            .chain(wt.pipes.iter().map(|p| p.id.as_str()))
            .chain(wt.pumps.iter().map(|p| p.id.as_str()))
            .chain(wt.tanks.iter().map(|t| t.id.as_str()))
            .chain(wt.reservoirs.iter().map(|r| r.id.as_str()))
            .chain(wt.demands.iter().map(|d| d.id.as_str())),
    ) {
        rep.push(&id, "duplicate id", "water section".into());
    }

    let junctions: BTreeMap<&str, &super::Junction> =
        wt.junctions.iter().map(|j| (j.id.as_str(), j)).collect();
    let check_junc = |rep: &mut ValidationReport, entity: &str, j: &str| {
        if !junctions.contains_key(j) {
            rep.push(entity, "unknown junction", j.to_string());
        }
    };

    for j in &wt.junctions {
        check_profile(&mut rep, &j.id, "head_min", &j.head_min, kp, "point");
        check_profile(&mut rep, &j.id, "head_max", &j.head_max, kp, "point");
        for k in 0..kp {
            if j.head_min.at(k) > j.head_max.at(k) {
                rep.push(&j.id, "head bounds out of order", format!("point {k}"));
                break;
            }
        }
        if j.elevation > j.head_min.min_over(kp) + 1e-9 {
            rep.push(&j.id, "elevation above minimum head", format!("{}", j.elevation));
        }
    }

    for p in &wt.pipes {
        check_junc(&mut rep, &p.id, &p.from);
        check_junc(&mut rep, &p.id, &p.to);
        if !(p.length > 0.0) || !(p.resistance > 0.0) {
            rep.push(&p.id, "pipe geometry not positive", String::new());
        }
        if !(p.q_min <= 0.0 && 0.0 <= p.q_max) {
            rep.push(&p.id, "flow bounds must straddle zero", format!("[{}, {}]", p.q_min, p.q_max));
        }
        if p.cost < 0.0 {
            rep.push(&p.id, "cost negative", format!("{}", p.cost));
        }
    }

    for p in &wt.pumps {
        check_junc(&mut rep, &p.id, &p.from);
        check_junc(&mut rep, &p.id, &p.to);
        if !(p.head_a < 0.0) {
            rep.push(&p.id, "head curve not concave", format!("a = {}", p.head_a));
        }
        if !(p.head_c > 0.0) {
            rep.push(&p.id, "head gain intercept not positive", format!("c = {}", p.head_c));
        }
        let eps = p.epsilon();
        if !(eps > 0.0 && eps <= p.q_max) {
            rep.push(&p.id, "minimum active flow out of range", format!("{eps}"));
        }
        if p.head_gain(eps) <= 0.0 || p.head_gain(p.q_max) <= 0.0 {
            rep.push(&p.id, "head gain not positive on active range", String::new());
        }
        if p.power_alpha < 0.0 || p.power_mu < 0.0 {
            rep.push(&p.id, "power coefficients negative", String::new());
        }
        if p.cost < 0.0 {
            rep.push(&p.id, "cost negative", format!("{}", p.cost));
        }
    }

    for t in &wt.tanks {
        check_junc(&mut rep, &t.id, &t.junction);
        if !(t.area > 0.0) {
            rep.push(&t.id, "tank area not positive", format!("{}", t.area));
        }
        if !(0.0 <= t.volume_init && t.volume_init <= t.volume_max) {
            rep.push(&t.id, "initial volume out of range", format!("{}", t.volume_init));
        }
        if t.expandable && t.volume_init != 0.0 {
            rep.push(&t.id, "expandable tank must start empty", format!("{}", t.volume_init));
        }
        if t.cost < 0.0 {
            rep.push(&t.id, "cost negative", format!("{}", t.cost));
        }
    }

    for r in &wt.reservoirs {
        check_junc(&mut rep, &r.id, &r.junction);
        if r.q_max < 0.0 {
            rep.push(&r.id, "injection cap negative", format!("{}", r.q_max));
        }
        if let Some(j) = junctions.get(r.junction.as_str()) {
            for k in 0..kp {
                if r.head < j.head_min.at(k) - 1e-9 || r.head > j.head_max.at(k) + 1e-9 {
                    rep.push(
                        &r.id,
                        "fixed head outside junction bounds",
                        format!("head {} at point {k}", r.head),
                    );
                    break;
                }
            }
        }
    }

    for d in &wt.demands {
        check_junc(&mut rep, &d.id, &d.junction);
        check_profile(&mut rep, &d.id, "q_max", &d.q_max, ki, "interval");
        if d.q_max.min_over(ki) < 0.0 {
            rep.push(&d.id, "demand negative", String::new());
        }
        if let Some(qm) = &d.q_min {
            check_profile(&mut rep, &d.id, "q_min", qm, ki, "interval");
            for k in 0..ki {
                if qm.at(k) > d.q_max.at(k) + 1e-12 {
                    rep.push(&d.id, "demand floor above cap", format!("interval {k}"));
                    break;
                }
            }
        }
    }

    // -------- interdependency links --------
    let pump_ids: BTreeSet<&str> = wt.pumps.iter().map(|p| p.id.as_str()).collect();
    let loads: BTreeMap<&str, &super::PowerLoad> =
        pw.loads.iter().map(|l| (l.id.as_str(), l)).collect();
    let mut linked_pumps = BTreeSet::new();
    for l in &net.links {
        let entity = format!("link {}->{}", l.pump, l.load);
        if !pump_ids.contains(l.pump.as_str()) {
            rep.push(&entity, "dangling interdependency", format!("unknown pump {}", l.pump));
        }
        match loads.get(l.load.as_str()) {
            None => rep.push(&entity, "dangling interdependency", format!("unknown load {}", l.load)),
            Some(load) if !load.is_pump_interface => {
                rep.push(&entity, "link target not a pump-interface load", l.load.clone())
            }
            _ => {}
        }
        if !linked_pumps.insert(l.pump.as_str()) {
            rep.push(&entity, "pump linked more than once", l.pump.clone());
        }
    }

    rep
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn minimal() -> JointNetwork {
        JointNetwork {
            format: FORMAT_TAG.into(),
            time_grid: TimeGrid::uniform(2, 1.0),
            power: PowerSection { base_mva: 1.0, ..Default::default() },
            water: WaterSection::default(),
            links: vec![],
            budget: 0.0,
            lambda: 1.0,
            notes: Default::default(),
        }
    }

    #[test]
    fn empty_network_is_clean() {
        assert!(minimal().validate().is_clean());
    }

    #[test]
    fn dangling_link_reported() {
        let mut net = minimal();
        net.water.pumps.push(Pump {
            id: "pu".into(),
            from: "a".into(),
            to: "b".into(),
            head_a: -1.0,
            head_b: 0.0,
            head_c: 10.0,
            min_flow: None,
            q_max: 10.0,
            power_alpha: 1.0,
            power_mu: 0.0,
            expandable: false,
            cost: 0.0,
        });
        net.links.push(Link { pump: "pu".into(), load: "nope".into() });
        let rep = net.validate();
        assert!(rep.has_rule("dangling interdependency"));
    }

    #[test]
    fn storage_efficiency_bound_case() {
        let mut net = minimal();
        net.power.buses.push(Bus {
            id: "b1".into(),
            phases: vec![Phase::A],
            vmin: 0.97.into(),
            vmax: 1.03.into(),
            source: true,
        });
        net.power.storages.push(Storage {
            id: "s1".into(),
            bus: "b1".into(),
            s_rating: 1.0,
            p_charge_max: 1.0,
            p_discharge_max: 1.0,
            energy_max: 1.0,
            eta_charge: 1.3,
            eta_discharge: 0.9,
            energy_init: 0.0,
            expandable: false,
            cost: 0.0,
        });
        let rep = net.validate();
        assert!(rep.has_rule("efficiency out of (0,1]"));
    }

    #[test]
    fn head_bounds_out_of_order_rejected() {
        let mut net = minimal();
        net.water.junctions.push(Junction {
            id: "j1".into(),
            head_min: 10.0.into(),
            head_max: 5.0.into(),
            elevation: 0.0,
        });
        assert!(net.validate().has_rule("head bounds out of order"));
    }

    #[test]
    fn validate_is_idempotent() {
        let net = minimal();
        assert_eq!(net.validate(), net.validate());
    }
}
