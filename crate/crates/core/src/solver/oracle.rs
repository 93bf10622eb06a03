//! Exhaustive verification oracle: enumerates every expansion-binary
//! combination inside the budget, solves the remaining status/continuous
//! problem for each, and keeps the best feasible solution. Ties break to the
//! lexicographically first plan in candidate order.

use super::bnb::{finish_solution, solve_system, RawSolution};
use super::{SolveError, SolveStatus, Solution, SolverConfig};
use crate::model::JointNetwork;
use crate::nlp::assemble::AssembleOptions;
use crate::nlp::{assemble_with, names};
use crate::Real;
use std::collections::BTreeMap;
use std::time::Instant;

pub fn enumerate_oracle(net: &JointNetwork, cfg: &SolverConfig) -> Result<Solution, SolveError> {
    enumerate_oracle_with(net, cfg, &AssembleOptions::default())
}

pub fn enumerate_oracle_with(
    net: &JointNetwork,
    cfg: &SolverConfig,
    opts: &AssembleOptions,
) -> Result<Solution, SolveError> {
    let t0 = Instant::now();
    let sys = assemble_with(net, opts).map_err(SolveError::Invalid)?;
    let n_bin = sys.vars.binaries().len();
    if n_bin > cfg.oracle_cap {
        return Err(SolveError::OracleCapExceeded { n: n_bin, cap: cfg.oracle_cap });
    }

    let candidates = net.expansion_candidates();
    let xvars: Vec<usize> = candidates
        .iter()
        .map(|c| sys.vars.index_of(&names::x(c.kind, &c.id)).expect("candidate variable"))
        .collect();
    let m = candidates.len();

    let mut best: Option<RawSolution> = None;
    let mut total_nodes = 0usize;
    let mut any_feasible = false;

    for mask in 0u64..(1u64 << m) {
        // lexicographic plan order: candidate 0 is the most significant bit
        let plan: Vec<Real> =
            (0..m).map(|i| ((mask >> (m - 1 - i)) & 1) as Real).collect();
        let cost: Real =
            plan.iter().zip(&candidates).map(|(&x, c)| x * c.cost).sum();
        if cost > net.budget + 1e-12 {
            continue;
        }
        let fixed: BTreeMap<usize, Real> =
            xvars.iter().cloned().zip(plan.iter().cloned()).collect();
        match solve_system(&sys, &fixed, cfg) {
            Ok(raw) => {
                total_nodes += raw.nodes;
                any_feasible = true;
                let better = match &best {
                    None => true,
                    // strict improvement keeps the earliest (lex-first) plan
                    Some(b) => raw.objective > b.objective + 1e-12 * b.objective.abs().max(1.0),
                };
                if better {
                    best = Some(raw);
                }
            }
            Err(SolveError::Infeasible) | Err(SolveError::NoIncumbentAtLimit) => {}
            Err(e) => return Err(e),
        }
    }

    match best {
        Some(mut raw) => {
            raw.status = SolveStatus::OracleCertified;
            raw.bound = raw.objective;
            raw.nodes = total_nodes;
            raw.seconds = t0.elapsed().as_secs_f64();
            Ok(finish_solution(net, &sys, raw))
        }
        None => {
            debug_assert!(!any_feasible);
            Err(SolveError::Infeasible)
        }
    }
}
