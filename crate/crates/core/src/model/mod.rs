//! Domain model for joint power/water network instances.
//!
//! Instances are plain data: a time grid, a power section, a water section,
//! pump-to-load interdependency links, an expansion budget, and the objective
//! weight. Power quantities are stored in per-unit on the declared MVA base;
//! water quantities are SI (heads in m, flows in L/s, volumes in m^3, time in
//! hours). Instances are immutable after construction and safe to share
//! across solver workers; construction and validation are single-threaded.
//!
//! The on-disk form is a JSON document with schema tag `jwpx-1` (see
//! [`JointNetwork::from_json`]).

pub mod profile;
pub mod validate;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub use profile::Profile;
pub use validate::{ValidationReport, Violation};

/// Schema tag expected in instance files.
pub const FORMAT_TAG: &str = "jwpx-1";

/// Conductor phases. Single-phase equipment lists one entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    A,
    B,
    C,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::A, Phase::B, Phase::C];

    /// Balanced reference angle for this phase, in radians.
    pub fn reference_angle(self) -> f64 {
        use std::f64::consts::PI;
        match self {
            Phase::A => 0.0,
            Phase::B => -2.0 * PI / 3.0,
            Phase::C => 2.0 * PI / 3.0,
        }
    }
}

/// Discretized planning horizon: `K` time points and `K-1` interval lengths
/// in hours. Heads, tank volumes, and stored energy live on points; flows,
/// statuses, and served demands live on intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TimeGridRepr", into = "TimeGridRepr")]
pub struct TimeGrid {
    points: Vec<f64>,
    steps: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TimeGridRepr {
    points: Vec<f64>,
}

impl TryFrom<TimeGridRepr> for TimeGrid {
    type Error = String;
    fn try_from(r: TimeGridRepr) -> Result<Self, String> {
        TimeGrid::new(r.points)
    }
}

impl From<TimeGrid> for TimeGridRepr {
    fn from(g: TimeGrid) -> Self {
        TimeGridRepr { points: g.points }
    }
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, String> {
        if points.len() < 2 {
            return Err("time grid needs at least two points".into());
        }
        let steps: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
        if steps.iter().any(|&dt| !(dt > 0.0)) {
            return Err("time points must be strictly increasing".into());
        }
        Ok(TimeGrid { points, steps })
    }

    /// Uniform grid of `n_intervals` steps of `dt` hours starting at 0.
    pub fn uniform(n_intervals: usize, dt: f64) -> Self {
        let points = (0..=n_intervals).map(|i| i as f64 * dt).collect();
        TimeGrid::new(points).expect("uniform grid is valid")
    }

    /// Number of time points K.
    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    /// Number of intervals K' = K - 1.
    pub fn n_intervals(&self) -> usize {
        self.steps.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Interval durations in hours.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn min_step(&self) -> f64 {
        self.steps.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

// ---------------------------------------------------------------------------
// Power section
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    pub phases: Vec<Phase>,
    /// Per-phase voltage magnitude bounds (p.u.), per interval.
    pub vmin: Profile,
    pub vmax: Profile,
    /// Source bus: voltage pinned at 1.0 p.u. with balanced angles. Exactly
    /// one bus must be flagged when the power section is nonempty.
    #[serde(default)]
    pub source: bool,
}

/// A line between two buses. `y` is the series admittance matrix over the
/// branch's phases; `yc_from`/`yc_to` are the shunt (charging) admittances
/// seen at each end. Thermal limits are apparent-power caps per phase per
/// interval; `None` leaves the flow unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    pub phases: Vec<Phase>,
    #[serde(with = "profile::cx_mat")]
    pub y: Vec<Vec<Complex64>>,
    #[serde(with = "profile::cx_mat", default = "Vec::new", skip_serializing_if = "Vec::is_empty")]
    pub yc_from: Vec<Vec<Complex64>>,
    #[serde(with = "profile::cx_mat", default = "Vec::new", skip_serializing_if = "Vec::is_empty")]
    pub yc_to: Vec<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_max: Option<Profile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    pub phases: Vec<Phase>,
    /// Per-phase active/reactive injection bounds (p.u.), per interval.
    pub p_min: Profile,
    pub p_max: Profile,
    pub q_min: Profile,
    pub q_max: Profile,
    #[serde(default)]
    pub expandable: bool,
    #[serde(default)]
    pub cost: f64,
    /// Existing generators have their on/off status pinned to 1 unless this
    /// is set; expandable generators always carry a status variable.
    #[serde(default)]
    pub switchable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Storage {
    pub id: String,
    pub bus: String,
    /// Inverter apparent-power rating (p.u., total across phases).
    pub s_rating: f64,
    pub p_charge_max: f64,
    pub p_discharge_max: f64,
    pub energy_max: f64,
    pub eta_charge: f64,
    pub eta_discharge: f64,
    pub energy_init: f64,
    #[serde(default)]
    pub expandable: bool,
    #[serde(default)]
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLoad {
    pub id: String,
    pub bus: String,
    pub phases: Vec<Phase>,
    /// Per-phase maximum active demand (p.u.), per interval. Served demand is
    /// a decision variable in `[p_min, p_max]`.
    pub p_max: Profile,
    /// Optional per-phase served-demand floor; defaults to 0 (fully
    /// sheddable). Experiments pin profiles by setting it equal to `p_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min: Option<Profile>,
    /// Reactive power tracks active power with this fixed ratio.
    #[serde(default)]
    pub q_over_p: f64,
    /// Member of the pump-interface load set; its active power is pinned to
    /// the linked pump's draw and it is excluded from the objective.
    #[serde(default)]
    pub is_pump_interface: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerSection {
    pub base_mva: f64,
    #[serde(default)]
    pub buses: Vec<Bus>,
    #[serde(default)]
    pub branches: Vec<Branch>,
    #[serde(default)]
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub storages: Vec<Storage>,
    #[serde(default)]
    pub loads: Vec<PowerLoad>,
}

// ---------------------------------------------------------------------------
// Water section
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub id: String,
    /// Head bounds (m) per time point.
    pub head_min: Profile,
    pub head_max: Profile,
    /// Base elevation (m); constant in time.
    pub elevation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipe {
    pub id: String,
    pub from: String,
    pub to: String,
    /// Length (m).
    pub length: f64,
    /// Hazen-Williams resistance per unit length, for flows in L/s and heads
    /// in m.
    pub resistance: f64,
    pub q_min: f64,
    pub q_max: f64,
    #[serde(default)]
    pub expandable: bool,
    #[serde(default)]
    pub cost: f64,
}

/// Fixed-speed pump. When active, head gain follows the concave curve
/// `G(q) = head_a q^2 + head_b q + head_c` with `head_a < 0`, `head_c > 0`,
/// and electrical draw is the affine `power_alpha * q + power_mu` (MW for q
/// in L/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pump {
    pub id: String,
    pub from: String,
    pub to: String,
    pub head_a: f64,
    pub head_b: f64,
    pub head_c: f64,
    /// Minimum active flow epsilon (L/s); defaults to 1e-3 * q_max.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_flow: Option<f64>,
    pub q_max: f64,
    pub power_alpha: f64,
    pub power_mu: f64,
    #[serde(default)]
    pub expandable: bool,
    #[serde(default)]
    pub cost: f64,
}

impl Pump {
    pub fn epsilon(&self) -> f64 {
        self.min_flow.unwrap_or(1e-3 * self.q_max)
    }

    pub fn head_gain(&self, q: f64) -> f64 {
        self.head_a * q * q + self.head_b * q + self.head_c
    }
}

/// Cylindrical tank with constant cross-sectional area. Expandable tanks are
/// attached through a synthesized short pipe gated by the tank's expansion
/// binary, and must be declared empty (`volume_init = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tank {
    pub id: String,
    pub junction: String,
    pub area: f64,
    pub volume_init: f64,
    pub volume_max: f64,
    /// Elevation of the tank floor (m). Defaults to the junction's own
    /// elevation; elevated tanks declare theirs explicitly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_elevation: Option<f64>,
    #[serde(default)]
    pub expandable: bool,
    #[serde(default)]
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reservoir {
    pub id: String,
    pub junction: String,
    /// Fixed head (m); pins the junction head.
    pub head: f64,
    /// Injection rate cap (L/s). Reservoirs are infinite sources; this only
    /// bounds the instantaneous rate.
    pub q_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterDemand {
    pub id: String,
    pub junction: String,
    /// Maximum withdrawal rate (L/s) per interval; served demand is a
    /// decision variable in `[q_min, q_max]`.
    pub q_max: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_min: Option<Profile>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WaterSection {
    #[serde(default)]
    pub junctions: Vec<Junction>,
    #[serde(default)]
    pub pipes: Vec<Pipe>,
    #[serde(default)]
    pub pumps: Vec<Pump>,
    #[serde(default)]
    pub tanks: Vec<Tank>,
    #[serde(default)]
    pub reservoirs: Vec<Reservoir>,
    #[serde(default)]
    pub demands: Vec<WaterDemand>,
}

// ---------------------------------------------------------------------------
// Joint instance
// ---------------------------------------------------------------------------

/// Pump-to-load interdependency: the pump's active power draw is spread over
/// the conductors of the referenced pump-interface load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub pump: String,
    pub load: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointNetwork {
    pub format: String,
    pub time_grid: TimeGrid,
    pub power: PowerSection,
    pub water: WaterSection,
    #[serde(default)]
    pub links: Vec<Link>,
    pub budget: f64,
    pub lambda: f64,
    /// Free-form notes on data provenance; ignored by the solver.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

/// Expansion candidate kinds, in the canonical ordering used for candidate
/// lists, plan strings, and oracle enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateKind {
    Storage,
    Tank,
    Pump,
    Pipe,
    Generator,
}

/// One expandable component with its budget cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub id: String,
    pub cost: f64,
}

impl JointNetwork {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let net: JointNetwork = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if net.format != FORMAT_TAG {
            return Err(format!(
                "unsupported format tag {:?}, expected {:?}",
                net.format, FORMAT_TAG
            ));
        }
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Expandable components in deterministic order (kind, then id).
    pub fn expansion_candidates(&self) -> Vec<Candidate> {
        let mut out = Vec::new();
        for s in self.power.storages.iter().filter(|s| s.expandable) {
            out.push(Candidate { kind: CandidateKind::Storage, id: s.id.clone(), cost: s.cost });
        }
        for t in self.water.tanks.iter().filter(|t| t.expandable) {
            out.push(Candidate { kind: CandidateKind::Tank, id: t.id.clone(), cost: t.cost });
        }
        for p in self.water.pumps.iter().filter(|p| p.expandable) {
            out.push(Candidate { kind: CandidateKind::Pump, id: p.id.clone(), cost: p.cost });
        }
        for p in self.water.pipes.iter().filter(|p| p.expandable) {
            out.push(Candidate { kind: CandidateKind::Pipe, id: p.id.clone(), cost: p.cost });
        }
        for g in self.power.generators.iter().filter(|g| g.expandable) {
            out.push(Candidate { kind: CandidateKind::Generator, id: g.id.clone(), cost: g.cost });
        }
        out.sort_by(|a, b| (a.kind, &a.id).cmp(&(b.kind, &b.id)));
        out
    }

    /// Reports every invariant violation; an empty report means the instance
    /// is well-formed. Idempotent and side-effect-free.
    pub fn validate(&self) -> ValidationReport {
        validate::validate(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_rejects_degenerate_input() {
        assert!(TimeGrid::new(vec![0.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, 2.0, 1.0]).is_err());
        let g = TimeGrid::new(vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(g.n_points(), 3);
        assert_eq!(g.steps(), &[1.0, 2.0]);
    }

    #[test]
    fn format_tag_checked() {
        let err = JointNetwork::from_json(
            r#"{"format":"nope","time_grid":{"points":[0,1]},
                "power":{"base_mva":1.0},"water":{},"budget":0.0,"lambda":1.0}"#,
        );
        assert!(err.is_err());
    }
}
