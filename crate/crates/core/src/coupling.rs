//! Interdependency coupling and problem closure: pump-as-load linking, the
//! demand-maximization objective, and the expansion budget.

use crate::nlp::assemble::{budget_expr, CtxX};
use crate::nlp::system::SystemBuilder;
use crate::nlp::Expr;
use crate::power::PowerLayout;
use crate::water::WaterLayout;
use crate::Real;

pub(crate) fn emit(
    b: &mut SystemBuilder,
    ctx: &CtxX,
    power: &PowerLayout,
    water: &WaterLayout,
    normalize: bool,
) {
    let ki = ctx.ki;
    let base = ctx.net.power.base_mva;

    // pump draw equals the linked load's active power, spread over the
    // load's conductors (MW on the left, per-unit demand on the right)
    let mut links: Vec<_> = ctx.net.links.iter().collect();
    links.sort_by(|a, b| a.pump.cmp(&b.pump));
    for link in links {
        let (pi, pump) = ctx
            .pumps
            .iter()
            .enumerate()
            .find(|(_, p)| p.id == link.pump)
            .expect("validated link pump");
        let (di, _) = ctx
            .loads
            .iter()
            .enumerate()
            .find(|(_, d)| d.id == link.load)
            .expect("validated link load");
        for k in 0..ki {
            let mut e = Expr::new();
            e.add_lin(water.qe[ctx.pump_edge[pi]][k], pump.power_alpha)
                .add_lin(water.zp[pi][k], pump.power_mu);
            for col in &power.pd[di] {
                e.add_lin(col[k], -base);
            }
            b.add_eq("pump-as-load", format!("{}.k{}", pump.id, k), e);
        }
    }

    // objective: weighted served power and water demand, maximized; pump
    // interface loads are excluded
    let (mut power_scale, mut water_scale) = (1.0, 1.0);
    if normalize {
        let mut peak_p: Real = 0.0;
        for k in 0..ki {
            let offered: Real = ctx
                .loads
                .iter()
                .filter(|d| !d.is_pump_interface)
                .map(|d| d.p_max.at(k) * d.phases.len() as Real * base)
                .sum();
            peak_p = peak_p.max(offered);
        }
        let mut peak_w: Real = 0.0;
        for k in 0..ki {
            let offered: Real = ctx.demands.iter().map(|(d, _)| d.q_max.at(k)).sum();
            peak_w = peak_w.max(offered);
        }
        power_scale = 1.0 / peak_p.max(1e-9);
        water_scale = 1.0 / peak_w.max(1e-9);
    }
    let lambda = ctx.net.lambda;
    for (di, d) in ctx.loads.iter().enumerate() {
        if d.is_pump_interface {
            continue;
        }
        for col in &power.pd[di] {
            for k in 0..ki {
                b.objective.add_lin(col[k], lambda * base * power_scale);
            }
        }
    }
    for (di, _) in ctx.demands.iter().enumerate() {
        for k in 0..ki {
            b.objective.add_lin(water.qd[di][k], (1.0 - lambda) * water_scale);
        }
    }

    if let Some(e) = budget_expr(ctx) {
        b.add_le("budget", format!("B={}", ctx.net.budget), e);
    }
}

#[cfg(test)]
mod tests {
    use crate::math::pump_power;

    #[test]
    fn pump_power_positive_at_minimum_flow() {
        let (alpha, mu, eps) = (2.5e-4, 0.0375, 0.42);
        assert!(pump_power(eps, 1.0, alpha, mu) > 0.0);
    }
}
