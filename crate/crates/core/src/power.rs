//! Power-network constraint builders: voltage limits, nodal balance, Ohm's
//! law in rectangular coordinates, thermal limits, generator and storage
//! models, and expansion gating.
//!
//! Voltages are complex per phase in rectangular parts, so every electrical
//! residual is polynomial with exact hand-coded Jacobians. The source bus is
//! pinned at 1.0 p.u. with balanced angles to remove the rotational degree
//! of freedom.

use crate::model::{CandidateKind, Phase};
use crate::nlp::assemble::CtxX;
use crate::nlp::system::SystemBuilder;
use crate::nlp::vars::BinClass;
use crate::nlp::{names, Expr};
use crate::Real;
use num_complex::Complex64;

/// Variable grids for the power side. Indexed `[entity][phase][interval]`
/// (or `[entity][interval]`, `[entity][point]` where noted); entries are
/// columns in the flat variable space.
pub(crate) struct PowerLayout {
    pub vr: Vec<Vec<Vec<usize>>>,
    pub vi: Vec<Vec<Vec<usize>>>,
    /// `[branch][direction][phase][interval]`; direction 0 is from->to.
    pub fp: Vec<[Vec<Vec<usize>>; 2]>,
    pub fq: Vec<[Vec<Vec<usize>>; 2]>,
    pub pg: Vec<Vec<Vec<usize>>>,
    pub qg: Vec<Vec<Vec<usize>>>,
    /// Status binaries; `None` for existing non-switchable units (status
    /// pinned to 1 and substituted).
    pub zg: Vec<Option<Vec<usize>>>,
    pub pbc: Vec<Vec<usize>>,
    pub pbd: Vec<Vec<usize>>,
    pub qb: Vec<Vec<usize>>,
    /// Stored energy per time point.
    pub es: Vec<Vec<usize>>,
    pub zb: Vec<Vec<usize>>,
    pub pd: Vec<Vec<Vec<usize>>>,
}

/// Registers every power-side variable with finite bounds.
pub(crate) fn register(b: &mut SystemBuilder, ctx: &CtxX) -> PowerLayout {
    let ki = ctx.ki;
    let kp = ctx.kp;

    let mut vr = Vec::new();
    let mut vi = Vec::new();
    for bus in &ctx.buses {
        let mut vr_b = Vec::new();
        let mut vi_b = Vec::new();
        for &ph in &bus.phases {
            let mut vr_p = Vec::new();
            let mut vi_p = Vec::new();
            for k in 0..ki {
                if bus.source {
                    let ang = ph.reference_angle();
                    let (re, im) = (ang.cos(), ang.sin());
                    vr_p.push(b.vars.add(names::vr(&bus.id, ph, k), re, re));
                    vi_p.push(b.vars.add(names::vi(&bus.id, ph, k), im, im));
                } else {
                    let vm = bus.vmax.at(k);
                    let ang = ph.reference_angle();
                    vr_p.push(b.vars.add_hinted(names::vr(&bus.id, ph, k), -vm, vm, ang.cos()));
                    vi_p.push(b.vars.add_hinted(names::vi(&bus.id, ph, k), -vm, vm, ang.sin()));
                }
            }
            vr_b.push(vr_p);
            vi_b.push(vi_p);
        }
        vr.push(vr_b);
        vi.push(vi_b);
    }

    let mut fp = Vec::new();
    let mut fq = Vec::new();
    for br in &ctx.branches {
        let mut dirs_p = [Vec::new(), Vec::new()];
        let mut dirs_q = [Vec::new(), Vec::new()];
        for dir in 0..2 {
            for (pi, &ph) in br.phases.iter().enumerate() {
                let mut col_p = Vec::new();
                let mut col_q = Vec::new();
                for k in 0..ki {
                    let cap = match &br.s_max {
                        Some(s) => s.at(k),
                        None => implied_flow_bound(ctx, br, pi, dir),
                    };
                    col_p.push(b.vars.add(names::fp(&br.id, dir == 0, ph, k), -cap, cap));
                    col_q.push(b.vars.add(names::fq(&br.id, dir == 0, ph, k), -cap, cap));
                }
                dirs_p[dir].push(col_p);
                dirs_q[dir].push(col_q);
            }
        }
        fp.push(dirs_p);
        fq.push(dirs_q);
    }

    let mut pg = Vec::new();
    let mut qg = Vec::new();
    let mut zg = Vec::new();
    for g in &ctx.gens {
        let statused = g.expandable || g.switchable;
        let mut pg_g = Vec::new();
        let mut qg_g = Vec::new();
        for &ph in &g.phases {
            let mut pcol = Vec::new();
            let mut qcol = Vec::new();
            for k in 0..ki {
                let (plo, phi, qlo, qhi) = (g.p_min.at(k), g.p_max.at(k), g.q_min.at(k), g.q_max.at(k));
                if statused {
                    // status 0 forces zero injection, so the box must admit it
                    pcol.push(b.vars.add(names::pg(&g.id, ph, k), plo.min(0.0), phi.max(0.0)));
                    qcol.push(b.vars.add(names::qg(&g.id, ph, k), qlo.min(0.0), qhi.max(0.0)));
                } else {
                    pcol.push(b.vars.add(names::pg(&g.id, ph, k), plo, phi));
                    qcol.push(b.vars.add(names::qg(&g.id, ph, k), qlo, qhi));
                }
            }
            pg_g.push(pcol);
            qg_g.push(qcol);
        }
        pg.push(pg_g);
        qg.push(qg_g);
        zg.push(statused.then(|| {
            (0..ki).map(|k| b.vars.add_binary(names::zg(&g.id, k), BinClass::GeneratorStatus)).collect()
        }));
    }

    let mut pbc = Vec::new();
    let mut pbd = Vec::new();
    let mut qb = Vec::new();
    let mut es = Vec::new();
    let mut zb = Vec::new();
    for s in &ctx.storages {
        pbc.push((0..ki).map(|k| b.vars.add(names::pbc(&s.id, k), 0.0, s.p_charge_max)).collect());
        pbd.push((0..ki).map(|k| b.vars.add(names::pbd(&s.id, k), 0.0, s.p_discharge_max)).collect());
        qb.push((0..ki).map(|k| b.vars.add(names::qb(&s.id, k), -s.s_rating, s.s_rating)).collect());
        es.push(
            (0..kp)
                .map(|t| {
                    if t == 0 {
                        b.vars.add(names::es(&s.id, t), s.energy_init, s.energy_init)
                    } else {
                        b.vars.add(names::es(&s.id, t), 0.0, s.energy_max)
                    }
                })
                .collect(),
        );
        zb.push((0..ki).map(|k| b.vars.add_binary(names::zb(&s.id, k), BinClass::StorageStatus)).collect());
    }

    let mut pd = Vec::new();
    for d in &ctx.loads {
        let mut pd_d = Vec::new();
        for &ph in &d.phases {
            let mut col = Vec::new();
            for k in 0..ki {
                let lo = d.p_min.as_ref().map(|p| p.at(k)).unwrap_or(0.0);
                // demand-propagated start: serve everything offered
                col.push(b.vars.add_hinted(names::pd(&d.id, ph, k), lo, d.p_max.at(k), d.p_max.at(k)));
            }
            pd_d.push(col);
        }
        pd.push(pd_d);
    }

    PowerLayout { vr, vi, fp, fq, pg, qg, zg, pbc, pbd, qb, es, zb, pd }
}

/// Finite fallback bound on a branch flow when no thermal limit is declared:
/// worst-case apparent power from voltage caps and admittance magnitudes.
fn implied_flow_bound(ctx: &CtxX, br: &crate::model::Branch, pi: usize, dir: usize) -> Real {
    let ki = ctx.ki;
    let (near, far) = if dir == 0 { (&br.from_bus, &br.to_bus) } else { (&br.to_bus, &br.from_bus) };
    let vmax = |id: &str| {
        let bus = ctx.buses[ctx.bus_pos[id]];
        bus.vmax.max_over(ki)
    };
    let (vn, vf) = (vmax(near), vmax(far));
    let yc = if dir == 0 { &br.yc_from } else { &br.yc_to };
    let mut bound = 0.0;
    for q in 0..br.phases.len() {
        let mut a = br.y[pi][q];
        if !yc.is_empty() {
            a += yc[pi][q];
        }
        bound += vn * (a.norm() * vn + br.y[pi][q].norm() * vf);
    }
    1.1 * bound
}

/// Adds the four quadratic terms of `sign * Re/Im(V_p * conj(m) * conj(V_q))`
/// to the given real/imaginary expressions.
fn add_v_conj_terms(
    re: &mut Expr,
    im: &mut Expr,
    sign: Real,
    (vrp, vip): (usize, usize),
    m: Complex64,
    (vrq, viq): (usize, usize),
) {
    let (g, h) = (m.re, m.im);
    re.add_quad(vrp, vrq, sign * g);
    re.add_quad(vip, viq, sign * g);
    re.add_quad(vip, vrq, sign * h);
    re.add_quad(vrp, viq, -sign * h);
    im.add_quad(vip, vrq, sign * g);
    im.add_quad(vrp, viq, -sign * g);
    im.add_quad(vrp, vrq, -sign * h);
    im.add_quad(vip, viq, -sign * h);
}

pub(crate) fn emit(b: &mut SystemBuilder, ctx: &CtxX, lay: &PowerLayout) {
    let ki = ctx.ki;

    // voltage magnitude window, squared form
    for (bi, bus) in ctx.buses.iter().enumerate() {
        for (pi, &ph) in bus.phases.iter().enumerate() {
            for k in 0..ki {
                let (vr, vi) = (lay.vr[bi][pi][k], lay.vi[bi][pi][k]);
                let label = format!("{}.{}.k{}", bus.id, names::phase(ph), k);
                let mut hi = Expr::with_constant(-bus.vmax.at(k).powi(2));
                hi.add_quad(vr, vr, 1.0).add_quad(vi, vi, 1.0);
                b.add_le("voltage-magnitude", label.clone(), hi);
                let mut lo = Expr::with_constant(bus.vmin.at(k).powi(2));
                lo.add_quad(vr, vr, -1.0).add_quad(vi, vi, -1.0);
                b.add_le("voltage-magnitude", label, lo);
            }
        }
    }

    // Ohm's law, both directions, split into real and imaginary residuals
    for (ei, br) in ctx.branches.iter().enumerate() {
        let fi = ctx.bus_pos[br.from_bus.as_str()];
        let ti = ctx.bus_pos[br.to_bus.as_str()];
        let n = br.phases.len();
        let phase_pos = |bus: usize, ph: Phase| -> usize {
            ctx.phases_of_bus(bus).iter().position(|&p| p == ph).expect("validated phase")
        };
        for dir in 0..2 {
            let (near, far) = if dir == 0 { (fi, ti) } else { (ti, fi) };
            let yc = if dir == 0 { &br.yc_from } else { &br.yc_to };
            for pi in 0..n {
                let ph = br.phases[pi];
                let near_p = (lay.vr[near][phase_pos(near, ph)].clone(), lay.vi[near][phase_pos(near, ph)].clone());
                for k in 0..ki {
                    let mut re = Expr::new();
                    let mut im = Expr::new();
                    re.add_lin(lay.fp[ei][dir][pi][k], 1.0);
                    im.add_lin(lay.fq[ei][dir][pi][k], 1.0);
                    for qi in 0..n {
                        let qh = br.phases[qi];
                        let mut a = br.y[pi][qi];
                        if !yc.is_empty() {
                            a += yc[pi][qi];
                        }
                        let vq_near = (
                            lay.vr[near][phase_pos(near, qh)][k],
                            lay.vi[near][phase_pos(near, qh)][k],
                        );
                        let vq_far =
                            (lay.vr[far][phase_pos(far, qh)][k], lay.vi[far][phase_pos(far, qh)][k]);
                        let vp = (near_p.0[k], near_p.1[k]);
                        // S_p = V_p conj((Y+Yc) V_near - Y V_far)_p
                        add_v_conj_terms(&mut re, &mut im, -1.0, vp, a, vq_near);
                        add_v_conj_terms(&mut re, &mut im, 1.0, vp, br.y[pi][qi], vq_far);
                    }
                    let d = if dir == 0 { "f" } else { "r" };
                    b.add_eq("ohms-law", format!("{}.{}.{}.k{}.p", br.id, d, names::phase(ph), k), re);
                    b.add_eq("ohms-law", format!("{}.{}.{}.k{}.q", br.id, d, names::phase(ph), k), im);
                }
            }
        }

        // thermal window on apparent flow; omitted when unbounded
        if let Some(smax) = &br.s_max {
            for dir in 0..2 {
                for (pi, &ph) in br.phases.iter().enumerate() {
                    for k in 0..ki {
                        let mut e = Expr::with_constant(-smax.at(k).powi(2));
                        e.add_quad(lay.fp[ei][dir][pi][k], lay.fp[ei][dir][pi][k], 1.0);
                        e.add_quad(lay.fq[ei][dir][pi][k], lay.fq[ei][dir][pi][k], 1.0);
                        let d = if dir == 0 { "f" } else { "r" };
                        b.add_le(
                            "thermal-limit",
                            format!("{}.{}.{}.k{}", br.id, d, names::phase(ph), k),
                            e,
                        );
                    }
                }
            }
        }
    }

    // nodal power balance per bus, phase, interval
    for (bi, bus) in ctx.buses.iter().enumerate() {
        let _ = bi;
        let share = 1.0 / bus.phases.len() as Real;
        for &ph in bus.phases.iter() {
            for k in 0..ki {
                let mut p = Expr::new();
                let mut q = Expr::new();
                for (gi, g) in ctx.gens.iter().enumerate() {
                    if g.bus == bus.id {
                        if let Some(gp) = g.phases.iter().position(|&x| x == ph) {
                            p.add_lin(lay.pg[gi][gp][k], 1.0);
                            q.add_lin(lay.qg[gi][gp][k], 1.0);
                        }
                    }
                }
                for (si, s) in ctx.storages.iter().enumerate() {
                    if s.bus == bus.id {
                        // balanced split of the storage withdrawal across the
                        // bus phases
                        p.add_lin(lay.pbc[si][k], -share);
                        p.add_lin(lay.pbd[si][k], share);
                        q.add_lin(lay.qb[si][k], -share);
                    }
                }
                for (di, d) in ctx.loads.iter().enumerate() {
                    if d.bus == bus.id {
                        if let Some(dp) = d.phases.iter().position(|&x| x == ph) {
                            p.add_lin(lay.pd[di][dp][k], -1.0);
                            q.add_lin(lay.pd[di][dp][k], -d.q_over_p);
                        }
                    }
                }
                for (ei, br) in ctx.branches.iter().enumerate() {
                    if let Some(bp) = br.phases.iter().position(|&x| x == ph) {
                        if br.from_bus == bus.id {
                            p.add_lin(lay.fp[ei][0][bp][k], -1.0);
                            q.add_lin(lay.fq[ei][0][bp][k], -1.0);
                        }
                        if br.to_bus == bus.id {
                            p.add_lin(lay.fp[ei][1][bp][k], -1.0);
                            q.add_lin(lay.fq[ei][1][bp][k], -1.0);
                        }
                    }
                }
                let label = format!("{}.{}.k{}", bus.id, names::phase(ph), k);
                b.add_eq("kcl", format!("{label}.p"), p);
                b.add_eq("kcl", format!("{label}.q"), q);
            }
        }
    }

    // generator windows tied to status, and expansion gating
    for (gi, g) in ctx.gens.iter().enumerate() {
        let Some(zg) = &lay.zg[gi] else { continue };
        for (pi, &ph) in g.phases.iter().enumerate() {
            for k in 0..ki {
                let label = format!("{}.{}.k{}", g.id, names::phase(ph), k);
                let mut up = Expr::new();
                up.add_lin(lay.pg[gi][pi][k], 1.0).add_lin(zg[k], -g.p_max.at(k));
                b.add_le("generator-bounds", format!("{label}.p.hi"), up);
                let mut lo = Expr::new();
                lo.add_lin(zg[k], g.p_min.at(k)).add_lin(lay.pg[gi][pi][k], -1.0);
                b.add_le("generator-bounds", format!("{label}.p.lo"), lo);
                let mut uq = Expr::new();
                uq.add_lin(lay.qg[gi][pi][k], 1.0).add_lin(zg[k], -g.q_max.at(k));
                b.add_le("generator-bounds", format!("{label}.q.hi"), uq);
                let mut lq = Expr::new();
                lq.add_lin(zg[k], g.q_min.at(k)).add_lin(lay.qg[gi][pi][k], -1.0);
                b.add_le("generator-bounds", format!("{label}.q.lo"), lq);
            }
        }
        if let Some(x) = ctx.xvar(CandidateKind::Generator, &g.id) {
            for k in 0..ki {
                let mut e = Expr::new();
                e.add_lin(zg[k], 1.0).add_lin(x, -1.0);
                b.add_le("expansion-gate", format!("{}.k{}", g.id, k), e);
            }
        }
    }

    // storage: inverter window, rate caps, energy recursion, recovery,
    // complementarity, expansion gating
    for (si, s) in ctx.storages.iter().enumerate() {
        let x = ctx.xvar(CandidateKind::Storage, &s.id);
        for k in 0..ki {
            let label = format!("{}.k{}", s.id, k);
            let (pc, pdch, qv, z) = (lay.pbc[si][k], lay.pbd[si][k], lay.qb[si][k], lay.zb[si][k]);

            let mut app = Expr::new();
            app.add_quad(pc, pc, 1.0)
                .add_quad(pdch, pdch, 1.0)
                .add_quad(pc, pdch, -2.0)
                .add_quad(qv, qv, 1.0)
                .add_quad(z, z, -s.s_rating.powi(2));
            b.add_le("storage-apparent", label.clone(), app);

            let mut qhi = Expr::new();
            qhi.add_lin(qv, 1.0).add_lin(z, -s.s_rating);
            b.add_le("storage-reactive", format!("{label}.hi"), qhi);
            let mut qlo = Expr::new();
            qlo.add_lin(qv, -1.0).add_lin(z, -s.s_rating);
            b.add_le("storage-reactive", format!("{label}.lo"), qlo);

            let mut chi = Expr::new();
            chi.add_lin(pc, 1.0).add_lin(z, -s.p_charge_max);
            b.add_le("storage-rate", format!("{label}.charge"), chi);
            let mut dhi = Expr::new();
            dhi.add_lin(pdch, 1.0).add_lin(z, -s.p_discharge_max);
            b.add_le("storage-rate", format!("{label}.discharge"), dhi);

            // E[k+1] - E[k] - dt (eta_c pbc - pbd / eta_d) = 0
            let mut en = Expr::new();
            en.add_lin(lay.es[si][k + 1], 1.0)
                .add_lin(lay.es[si][k], -1.0)
                .add_lin(pc, -ctx.steps[k] * s.eta_charge)
                .add_lin(pdch, ctx.steps[k] / s.eta_discharge);
            b.add_eq("storage-energy", label.clone(), en);

            let mut comp = Expr::new();
            comp.add_quad(pc, pdch, 1.0);
            b.add_eq("storage-complementarity", label.clone(), comp);

            if let Some(x) = x {
                let mut e = Expr::new();
                e.add_lin(z, 1.0).add_lin(x, -1.0);
                b.add_le("expansion-gate", label, e);
            }
        }
        let mut rec = Expr::new();
        rec.add_lin(lay.es[si][0], 1.0).add_lin(lay.es[si][ctx.kp - 1], -1.0);
        b.add_le("storage-recovery", s.id.clone(), rec);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlp::EvalMode;

    /// Independent complex-arithmetic oracle for one phase of Ohm's law.
    fn ohm_oracle(vi_: Complex64, vj: Complex64, y: Complex64, yc: Complex64) -> Complex64 {
        vi_ * ((y + yc) * vi_ - y * vj).conj()
    }

    #[test]
    fn ohms_law_matches_complex_oracle_single_phase() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let vi_ = Complex64::new(rng.gen_range(0.9..1.1), rng.gen_range(-0.2..0.2));
            let vj = Complex64::new(rng.gen_range(0.9..1.1), rng.gen_range(-0.2..0.2));
            let y = Complex64::new(rng.gen_range(1.0..30.0), rng.gen_range(-60.0..-1.0));
            let yc = Complex64::new(0.0, rng.gen_range(0.0..0.1));

            // assemble the two residual expressions by hand
            let mut re = Expr::new();
            let mut im = Expr::new();
            // vars: 0 vr_i, 1 vi_i, 2 vr_j, 3 vi_j, 4 fp, 5 fq
            re.add_lin(4, 1.0);
            im.add_lin(5, 1.0);
            add_v_conj_terms(&mut re, &mut im, -1.0, (0, 1), y + yc, (0, 1));
            add_v_conj_terms(&mut re, &mut im, 1.0, (0, 1), y, (2, 3));

            let s = ohm_oracle(vi_, vj, y, yc);
            let x = vec![vi_.re, vi_.im, vj.re, vj.im, s.re, s.im];
            assert!(re.eval(&x, EvalMode::Exact).abs() <= 1e-12);
            assert!(im.eval(&x, EvalMode::Exact).abs() <= 1e-12);
        }
    }

    #[test]
    fn equal_voltages_no_charging_no_flow() {
        let v = Complex64::new(1.01, -0.03);
        let y = Complex64::new(15.0, -45.0);
        let s = ohm_oracle(v, v, y, Complex64::new(0.0, 0.0));
        assert!(s.norm() <= 1e-12);
    }

    #[test]
    fn lossless_line_conserves_active_power() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let vi_ = Complex64::new(rng.gen_range(0.9..1.1), rng.gen_range(-0.2..0.2));
            let vj = Complex64::new(rng.gen_range(0.9..1.1), rng.gen_range(-0.2..0.2));
            let y = Complex64::new(0.0, rng.gen_range(-80.0..-1.0)); // purely reactive
            let zero = Complex64::new(0.0, 0.0);
            let sij = ohm_oracle(vi_, vj, y, zero);
            let sji = ohm_oracle(vj, vi_, y, zero);
            assert!(
                (sij.re + sji.re).abs() <= 1e-10,
                "lossless line should conserve active power"
            );
        }
    }

    #[test]
    fn passive_line_losses_nonnegative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let vi_ = Complex64::new(rng.gen_range(0.9..1.1), rng.gen_range(-0.2..0.2));
            let vj = Complex64::new(rng.gen_range(0.9..1.1), rng.gen_range(-0.2..0.2));
            // passive series impedance: positive resistance
            let z = Complex64::new(rng.gen_range(0.001..0.05), rng.gen_range(0.001..0.1));
            let y = z.inv();
            let zero = Complex64::new(0.0, 0.0);
            let sij = ohm_oracle(vi_, vj, y, zero);
            let sji = ohm_oracle(vj, vi_, y, zero);
            assert!(sij.re + sji.re >= -1e-12);
        }
    }
}
