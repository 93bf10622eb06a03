//! Canonical variable names. Builders and post-processing agree on these
//! formats; anything that reads a solution by name goes through here.

use crate::model::{CandidateKind, Phase};

pub fn phase(p: Phase) -> &'static str {
    match p {
        Phase::A => "a",
        Phase::B => "b",
        Phase::C => "c",
    }
}

fn kind(k: CandidateKind) -> &'static str {
    match k {
        CandidateKind::Storage => "storage",
        CandidateKind::Tank => "tank",
        CandidateKind::Pump => "pump",
        CandidateKind::Pipe => "pipe",
        CandidateKind::Generator => "generator",
    }
}

/// Expansion binary for a candidate component.
pub fn x(k: CandidateKind, id: &str) -> String {
    format!("x[{}:{}]", kind(k), id)
}

pub fn vr(bus: &str, p: Phase, k: usize) -> String {
    format!("vr[{bus}.{}.k{k}]", phase(p))
}

pub fn vi(bus: &str, p: Phase, k: usize) -> String {
    format!("vi[{bus}.{}.k{k}]", phase(p))
}

/// Branch active-power flow; `fwd` distinguishes the from->to direction.
pub fn fp(branch: &str, fwd: bool, p: Phase, k: usize) -> String {
    format!("fp[{branch}.{}.{}.k{k}]", if fwd { "f" } else { "r" }, phase(p))
}

pub fn fq(branch: &str, fwd: bool, p: Phase, k: usize) -> String {
    format!("fq[{branch}.{}.{}.k{k}]", if fwd { "f" } else { "r" }, phase(p))
}

pub fn pg(gen: &str, p: Phase, k: usize) -> String {
    format!("pg[{gen}.{}.k{k}]", phase(p))
}

pub fn qg(gen: &str, p: Phase, k: usize) -> String {
    format!("qg[{gen}.{}.k{k}]", phase(p))
}

pub fn zg(gen: &str, k: usize) -> String {
    format!("zg[{gen}.k{k}]")
}

pub fn pbc(storage: &str, k: usize) -> String {
    format!("pbc[{storage}.k{k}]")
}

pub fn pbd(storage: &str, k: usize) -> String {
    format!("pbd[{storage}.k{k}]")
}

pub fn qb(storage: &str, k: usize) -> String {
    format!("qb[{storage}.k{k}]")
}

/// Stored energy at time point `t`.
pub fn es(storage: &str, t: usize) -> String {
    format!("es[{storage}.t{t}]")
}

pub fn zb(storage: &str, k: usize) -> String {
    format!("zb[{storage}.k{k}]")
}

/// Served active demand of a load conductor.
pub fn pd(load: &str, p: Phase, k: usize) -> String {
    format!("pd[{load}.{}.k{k}]", phase(p))
}

/// Junction head at time point `t`.
pub fn h(junction: &str, t: usize) -> String {
    format!("h[{junction}.t{t}]")
}

/// Edge (pipe or pump) volumetric flow over interval `k`.
pub fn q(edge: &str, k: usize) -> String {
    format!("q[{edge}.k{k}]")
}

pub fn qd(demand: &str, k: usize) -> String {
    format!("qd[{demand}.k{k}]")
}

pub fn qr(reservoir: &str, k: usize) -> String {
    format!("qr[{reservoir}.k{k}]")
}

/// Tank exchange rate (positive withdraws from the tank).
pub fn qt(tank: &str, k: usize) -> String {
    format!("qt[{tank}.k{k}]")
}

/// Tank volume at time point `t`.
pub fn vt(tank: &str, t: usize) -> String {
    format!("vt[{tank}.t{t}]")
}

pub fn zp(pump: &str, k: usize) -> String {
    format!("zp[{pump}.k{k}]")
}

/// Pump head gain over interval `k`.
pub fn gp(pump: &str, k: usize) -> String {
    format!("gp[{pump}.k{k}]")
}

/// Synthetic node carrying an expandable tank.
pub fn tank_node(tank: &str) -> String {
    format!("{tank}.node")
}

/// Synthetic gated pipe attaching an expandable tank.
pub fn tank_pipe(tank: &str) -> String {
    format!("{tank}.pipe")
}
