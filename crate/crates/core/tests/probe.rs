// Temporary development probe. Will be replaced by the acceptance suite.

use jwpx_core::scenario;
use jwpx_core::solver::branch_and_bound;
use jwpx_core::SolverConfig;
use std::time::Instant;

#[test]
fn bnb_regimes_experiment1() {
    let cfg = SolverConfig::default();
    let t_all = Instant::now();
    for budget in [0.0, 0.39, 0.4, 0.5, 0.6, 0.9, 1.0] {
        let mut net = scenario::build_testcase();
        scenario::apply_experiment1(&mut net);
        net.budget = budget;
        let t = Instant::now();
        let sol = branch_and_bound(&net, &cfg).expect("solves");
        let peak = scenario::served_power_mw(&net, &sol, 4);
        println!(
            "B={budget:<4} obj={:.6} peak={:.4} plan={:?} nodes={} in {:.2?} viol={:.2e}",
            sol.objective,
            peak,
            sol.built(),
            sol.nodes,
            t.elapsed(),
            sol.feasibility.max_violation(),
        );
    }
    println!("total: {:.2?}", t_all.elapsed());
}

#[test]
fn bnb_regimes_experiment2() {
    let cfg = SolverConfig::default();
    let t_all = Instant::now();
    for budget in [0.0, 0.4, 0.6, 1.0] {
        let mut net = scenario::build_testcase_swapped();
        scenario::apply_experiment2(&mut net);
        net.budget = budget;
        let t = Instant::now();
        let sol = branch_and_bound(&net, &cfg).expect("solves");
        let peak = scenario::served_water_lps(&net, &sol, 4);
        println!(
            "B={budget:<4} obj={:.6} peakw={:.3} plan={:?} nodes={} in {:.2?} viol={:.2e}",
            sol.objective,
            peak,
            sol.built(),
            sol.nodes,
            t.elapsed(),
            sol.feasibility.max_violation(),
        );
    }
    println!("total: {:.2?}", t_all.elapsed());
}
