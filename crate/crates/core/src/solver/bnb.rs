//! Best-first branch-and-bound over the binary variables.
//!
//! Node bounds come from multi-start local solves of the nonconvex
//! relaxation, so they are heuristic; pruning is conservative (only against
//! the incumbent value itself) and incumbents are always re-solved with all
//! binaries fixed and re-verified against the exact constraint forms.

use super::subnlp::{solve_relaxation, SubStatus};
use super::{SolveError, SolveStatus, Solution, SolverConfig};
use crate::model::JointNetwork;
use crate::nlp::assemble::AssembleOptions;
use crate::nlp::system::ConstraintSystem;
use crate::nlp::vars::BinClass;
use crate::nlp::{assemble_with, names};
use crate::Real;
use std::collections::{BinaryHeap, BTreeMap};
use std::time::Instant;

pub fn branch_and_bound(net: &JointNetwork, cfg: &SolverConfig) -> Result<Solution, SolveError> {
    branch_and_bound_with(net, cfg, &AssembleOptions::default())
}

pub fn branch_and_bound_with(
    net: &JointNetwork,
    cfg: &SolverConfig,
    opts: &AssembleOptions,
) -> Result<Solution, SolveError> {
    let sys = assemble_with(net, opts).map_err(SolveError::Invalid)?;
    let sol = solve_system(&sys, &BTreeMap::new(), cfg)?;
    Ok(finish_solution(net, &sys, sol))
}

/// Search outcome before plan extraction.
pub(crate) struct RawSolution {
    pub status: SolveStatus,
    pub x: Vec<Real>,
    pub objective: Real,
    pub bound: Real,
    pub nodes: usize,
    pub seconds: f64,
}

pub(crate) fn finish_solution(
    net: &JointNetwork,
    sys: &ConstraintSystem,
    raw: RawSolution,
) -> Solution {
    let mut plan = BTreeMap::new();
    for c in net.expansion_candidates() {
        let idx = sys.vars.index_of(&names::x(c.kind, &c.id)).expect("candidate variable");
        plan.insert(c.id.clone(), raw.x[idx] > 0.5);
    }
    let schedule: BTreeMap<String, Real> =
        (0..sys.n_vars()).map(|i| (sys.vars.name(i).to_string(), raw.x[i])).collect();
    let feasibility = sys.check_feasible(&raw.x, 1e-6).expect("dim ok");
    let bound = raw.bound.max(raw.objective);
    Solution {
        status: raw.status,
        objective: raw.objective,
        bound,
        gap: (bound - raw.objective) / bound.abs().max(1.0),
        nodes: raw.nodes,
        seconds: raw.seconds,
        plan,
        schedule,
        feasibility,
    }
}

struct Node {
    id: usize,
    depth: usize,
    /// Parent relaxation value: optimistic estimate used for ordering.
    est: Real,
    fixed: BTreeMap<usize, Real>,
    warm: Option<Vec<Real>>,
}

struct HeapEntry {
    est: Real,
    id: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, o: &Self) -> bool {
        self.est == o.est && self.id == o.id
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        // max-heap on estimate; lowest node id wins ties for determinism
        self.est
            .total_cmp(&o.est)
            .then_with(|| o.id.cmp(&self.id))
    }
}

/// Branch-and-bound over the free binaries of an assembled system, with
/// `root_fixed` assignments pinned throughout the search.
pub(crate) fn solve_system(
    sys: &ConstraintSystem,
    root_fixed: &BTreeMap<usize, Real>,
    cfg: &SolverConfig,
) -> Result<RawSolution, SolveError> {
    let t0 = Instant::now();
    let binaries = sys.vars.binaries();

    let mut nodes: BTreeMap<usize, Node> = BTreeMap::new();
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut next_id = 0usize;
    let push = |nodes: &mut BTreeMap<usize, Node>, heap: &mut BinaryHeap<HeapEntry>, n: Node| {
        heap.push(HeapEntry { est: n.est, id: n.id });
        nodes.insert(n.id, n);
    };
    push(
        &mut nodes,
        &mut heap,
        Node { id: next_id, depth: 0, est: Real::INFINITY, fixed: root_fixed.clone(), warm: None },
    );
    next_id += 1;

    let mut incumbent: Option<(Real, Vec<Real>)> = None;
    let mut explored = 0usize;
    let mut status = SolveStatus::HeuristicGlobal;
    // confirmed value per rounded binary assignment; seeds derive from the
    // assignment so identical fixings verify identically everywhere
    let mut confirmed: BTreeMap<Vec<u8>, Option<(Real, Vec<Real>)>> = BTreeMap::new();
    // status binary -> its expansion gate, from the gating rows
    let gate_of: BTreeMap<usize, usize> = sys
        .residuals
        .iter()
        .filter(|r| r.tag == "expansion-gate" && r.expr.lin.len() == 2)
        .filter_map(|r| {
            let z = r.expr.lin.iter().find(|t| t.coef > 0.0)?.var;
            let x = r.expr.lin.iter().find(|t| t.coef < 0.0)?.var;
            Some((z, x))
        })
        .collect();

    while let Some(entry) = heap.pop() {
        let node = nodes.remove(&entry.id).expect("heap entry has node");
        let inc_val = incumbent.as_ref().map(|(v, _)| *v).unwrap_or(Real::NEG_INFINITY);

        // gap termination against the most optimistic open estimate
        if let Some((inc, _)) = &incumbent {
            let open_best = node.est.max(*inc);
            if open_best.is_finite() {
                let gap = (open_best - inc) / open_best.abs().max(1.0);
                if gap <= cfg.gap {
                    return Ok(RawSolution {
                        status,
                        x: incumbent.as_ref().unwrap().1.clone(),
                        objective: inc_val,
                        bound: open_best,
                        nodes: explored,
                        seconds: t0.elapsed().as_secs_f64(),
                    });
                }
            }
        }

        if explored >= cfg.node_limit
            || cfg.time_limit.map(|tl| t0.elapsed().as_secs_f64() > tl).unwrap_or(false)
        {
            status = SolveStatus::LimitHit;
            break;
        }
        explored += 1;

        let t_node = Instant::now();
        let out = solve_relaxation(sys, &node.fixed, node.warm.as_deref(), cfg, node.id as u64);
        if std::env::var_os("JWPX_DEBUG_BNB").is_some() {
            eprintln!(
                "bnb node={} depth={} fixed={} status={:?} obj={:.6} viol={:.2e} in {:?}",
                node.id, node.depth, node.fixed.len(), out.status, out.objective, out.violation,
                t_node.elapsed()
            );
        }
        let open_bound = open_estimate(&heap, inc_val);
        log::debug!(
            target: "solver",
            "node={} depth={} bound={:.9} incumbent={:.9} gap={:.3e}",
            node.id,
            node.depth,
            out.objective,
            inc_val,
            (open_bound.max(out.objective) - inc_val) / open_bound.abs().max(1.0)
        );

        if out.status == SubStatus::Infeasible {
            continue;
        }
        // conservative value prune: only below the incumbent itself
        if out.objective <= inc_val + 1e-9 * inc_val.abs().max(1.0) && incumbent.is_some() {
            continue;
        }

        // primal heuristics: verify rounded assignments of this node's
        // relaxation (memoized per assignment). Besides the plain rounding,
        // try the all-on schedule: statuses follow their expansion gate,
        // which is the dominant pattern in this model family.
        let plain: Vec<u8> = binaries
            .iter()
            .map(|&bv| node.fixed.get(&bv).copied().unwrap_or(out.x[bv]).round() as u8)
            .collect();
        let mut on = plain.clone();
        for (i, &bv) in binaries.iter().enumerate() {
            if node.fixed.contains_key(&bv) || sys.vars.bin_class(bv) == Some(BinClass::Expansion) {
                continue;
            }
            on[i] = match gate_of.get(&bv) {
                Some(x) => {
                    let pos = binaries.iter().position(|b| b == x).expect("gate is binary");
                    on[pos]
                }
                None => 1,
            };
        }
        let mut attained = Real::NEG_INFINITY;
        for rounded in [plain, on] {
            let entry = confirmed.entry(rounded.clone()).or_insert_with(|| {
                let mut fixed_all = node.fixed.clone();
                for (&bv, &bit) in binaries.iter().zip(&rounded) {
                    fixed_all.insert(bv, bit as Real);
                }
                let stream = rounded
                    .iter()
                    .fold(0x9E37_79B9_7F4A_7C15u64, |a, &b| a.rotate_left(1) ^ (0xC0FFEE + b as u64));
                let conf = solve_relaxation(sys, &fixed_all, None, cfg, stream);
                if std::env::var_os("JWPX_DEBUG_BNB").is_some() {
                    let bits: String =
                        rounded.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
                    eprintln!(
                        "bnb confirm bits={} status={:?} obj={:.6} viol={:.2e}",
                        bits, conf.status, conf.objective, conf.violation
                    );
                }
                (conf.status == SubStatus::Solved && conf.violation <= cfg.feas_tol)
                    .then_some((conf.objective, conf.x))
            });
            if let Some((cobj, cx)) = entry {
                attained = attained.max(*cobj);
                let improves = match &incumbent {
                    None => true,
                    Some((v, _)) => *cobj > v + 1e-12 * v.abs().max(1.0),
                };
                if improves {
                    incumbent = Some((*cobj, cx.clone()));
                }
            }
        }
        // fathom when the verified rounding already attains the node's own
        // (heuristic) bound
        if attained >= out.objective - 1e-7 * out.objective.abs().max(1.0) {
            continue;
        }

        let branch_var = most_fractional(sys, &binaries, &node.fixed, &out.x, cfg.int_tol)
            .or_else(|| first_free_binary(sys, &binaries, &node.fixed));
        if let Some(bv) = branch_var {
            let primary = out.x[bv].round();
            for val in [primary, 1.0 - primary] {
                let mut fixed = node.fixed.clone();
                fixed.insert(bv, val);
                push(
                    &mut nodes,
                    &mut heap,
                    Node {
                        id: next_id,
                        depth: node.depth + 1,
                        est: out.objective,
                        fixed,
                        warm: Some(out.x.clone()),
                    },
                );
                next_id += 1;
            }
        }
    }

    match incumbent {
        Some((obj, x)) => {
            let bound = open_estimate(&heap, obj);
            Ok(RawSolution {
                status,
                x,
                objective: obj,
                bound,
                nodes: explored,
                seconds: t0.elapsed().as_secs_f64(),
            })
        }
        None => {
            if status == SolveStatus::LimitHit {
                Err(SolveError::NoIncumbentAtLimit)
            } else {
                Err(SolveError::Infeasible)
            }
        }
    }
}

fn open_estimate(heap: &BinaryHeap<HeapEntry>, inc: Real) -> Real {
    let open = heap.peek().map(|e| e.est).unwrap_or(Real::NEG_INFINITY);
    if open.is_finite() {
        open.max(inc)
    } else {
        inc
    }
}

fn first_free_binary(
    sys: &ConstraintSystem,
    binaries: &[usize],
    fixed: &BTreeMap<usize, Real>,
) -> Option<usize> {
    for class in [
        BinClass::Expansion,
        BinClass::StorageStatus,
        BinClass::PumpStatus,
        BinClass::GeneratorStatus,
    ] {
        if let Some(&bv) = binaries
            .iter()
            .find(|&&bv| !fixed.contains_key(&bv) && sys.vars.bin_class(bv) == Some(class))
        {
            return Some(bv);
        }
    }
    None
}

/// Most fractional free binary within the highest-priority class that has
/// any fractional variable; ties break to the lowest index.
fn most_fractional(
    sys: &ConstraintSystem,
    binaries: &[usize],
    fixed: &BTreeMap<usize, Real>,
    x: &[Real],
    int_tol: Real,
) -> Option<usize> {
    for class in [
        BinClass::Expansion,
        BinClass::StorageStatus,
        BinClass::PumpStatus,
        BinClass::GeneratorStatus,
    ] {
        let mut best: Option<(Real, usize)> = None;
        for &bv in binaries {
            if fixed.contains_key(&bv) || sys.vars.bin_class(bv) != Some(class) {
                continue;
            }
            let v = x[bv];
            let dist = v.min(1.0 - v);
            if dist <= int_tol {
                continue;
            }
            let better = match best {
                None => true,
                Some((d, i)) => dist > d + 1e-15 || (dist >= d - 1e-15 && bv < i),
            };
            if better {
                best = Some((dist, bv));
            }
        }
        if let Some((_, bv)) = best {
            return Some(bv);
        }
    }
    None
}
