//! The suite bodies behind [`run_suite`].

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde_json::{json, Value};

use super::{threshold, Check, Relation, Suite, SuiteOutput, VerifyConfig};
use crate::character::character_table;
use crate::dirichlet::{chu_vandermonde_check, d_coefficients, exp_decomposition_check, vandermonde_solve};
use crate::euler_local::{abundance_report, local_factor, local_zeros, rankin_average};
use crate::lfunction::{d_value, funceq_residual, EvalSettings};
use crate::newform::{hecke_extend, hecke_extend_exact, Newform};
use crate::primes::primes_up_to;
use crate::twists::additive::d_additive_via_characters;
use crate::twists::expansions::{
    a_mellin_expansion_check, b_taylor_fit, fbar_kernel_check, fbar_slope, g_decay_check, MELLIN_Y_MIN,
};
use crate::twists::identity::{IdentityContext, ResidueSet};
use crate::twists::phi::{ibp_expansion_check, phi_mellin, phi_mellin_closed};
use crate::twists::UpperHalfPoint;
use crate::zeros::{count_zeros, hardy_z, laurent_check, scan_zeros, ZeroRecord};
use crate::{Error, Result, C64};

/// Runs one suite; failures inside a suite become failed checks.
pub fn run_suite(suite: Suite, f: &Newform, cfg: &VerifyConfig, settings: &EvalSettings) -> SuiteOutput {
    let mut out = SuiteOutput::default();
    let result = match suite {
        Suite::Coefficients => coefficients(f, &mut out),
        Suite::Algebra => algebra(&mut out),
        Suite::Funceq => funceq(f, settings, &mut out),
        Suite::Zeros => zeros(f, cfg, settings, &mut out),
        Suite::Dseries => dseries(f, cfg, settings, &mut out),
        Suite::Poles => poles(f, cfg, settings, &mut out),
        Suite::Identity => identity(f, cfg, settings, &mut out),
        Suite::Ibp => ibp(f, cfg, &mut out),
        Suite::Expansion => expansion(f, cfg, settings, &mut out),
        Suite::Rankin => rankin(f, cfg, &mut out),
    };
    if let Err(e) = result {
        out.push(Check::failed(format!("{suite}_setup"), Relation::Equal, 0.0, &e));
    }
    out
}

fn coefficients(f: &Newform, out: &mut SuiteOutput) -> Result<()> {
    let n = f.n_max();
    let primes = primes_up_to(n);
    let mismatches = match f.exact() {
        Some(ex) if f.nebentypus().is_trivial() => {
            let map: BTreeMap<u64, i128> = primes.iter().map(|&p| (p, ex[p as usize - 1])).collect();
            let ext = hecke_extend_exact(&map, f.weight(), f.level(), n)?;
            ext.iter().zip(ex).filter(|(a, b)| a != b).count()
        }
        _ => {
            let map: BTreeMap<u64, C64> = primes.iter().map(|&p| (p, f.a(p as usize))).collect();
            let ext = hecke_extend(&map, f.weight(), f.level(), f.nebentypus(), n)?;
            let scale = |i: usize| ((i + 1) as f64).powf((f.weight() as f64 - 1.0) / 2.0);
            ext.iter()
                .enumerate()
                .filter(|&(i, a)| (a - f.a(i + 1)).norm() > 1e-9 * scale(i))
                .count()
        }
    };
    out.data.insert("n_max".into(), json!(n));
    out.push(Check::new(
        "hecke_extension_mismatches",
        Relation::Equal,
        mismatches as f64,
        threshold("coeff_mismatches"),
    ));
    Ok(())
}

fn algebra(out: &mut SuiteOutput) -> Result<()> {
    let mut worst: f64 = 0.0;
    for q in primes_up_to(101) {
        worst = worst.max(exp_decomposition_check(q)?);
    }
    out.push(Check::new(
        "exp_decomposition_q_le_101",
        Relation::Below,
        worst,
        threshold("exp_decomposition"),
    ));
    let mut cv_failures = 0;
    for m in 0..=10 {
        for k in 1..=20 {
            if !chu_vandermonde_check(m, k)? {
                cv_failures += 1;
            }
        }
    }
    out.push(Check::new("chu_vandermonde_m_le_10_k_le_20_failures", Relation::Equal, cv_failures as f64, 0.0));
    let mut vs_failures = 0;
    for m in 1..=8 {
        let qs: Vec<u64> = primes_up_to(30).into_iter().take(m).collect();
        for m0 in 0..m {
            if vandermonde_solve(&qs, m0).is_err() {
                vs_failures += 1;
            }
        }
    }
    out.push(Check::new("vandermonde_exact_m_le_8_failures", Relation::Equal, vs_failures as f64, 0.0));
    Ok(())
}

/// Re s ∈ {2, 4, 6, 8, 10} × Im s ∈ {−30, −30 + 60/9, …, 30}.
pub fn funceq_grid() -> Vec<C64> {
    let mut grid = Vec::with_capacity(50);
    for i in 0..5 {
        for j in 0..10 {
            grid.push(C64::new(2.0 + 2.0 * i as f64, -30.0 + 60.0 * j as f64 / 9.0));
        }
    }
    grid
}

fn worst_funceq(f: &Newform, settings: &EvalSettings) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in funceq_grid() {
        worst = worst.max(funceq_residual(f, s, settings)?);
    }
    Ok(worst)
}

fn funceq(f: &Newform, settings: &EvalSettings, out: &mut SuiteOutput) -> Result<()> {
    out.push(Check::from_result(
        "funceq_grid_50",
        Relation::Below,
        worst_funceq(f, settings),
        threshold("funceq_rel"),
    ));
    if !f.level().is_multiple_of(5) {
        let chars = character_table(5)?;
        let quad = chars
            .iter()
            .find(|c| c.is_real() && !c.is_trivial())
            .ok_or_else(|| Error::Invariant("no quadratic character mod 5".into()))?;
        let twisted = f.twist(quad)?;
        out.data.insert(
            "twist".into(),
            json!({
                "level": twisted.level(),
                "root_number": [twisted.root_number().re, twisted.root_number().im],
            }),
        );
        out.push(Check::from_result(
            "funceq_twist_chi5_grid_50",
            Relation::Below,
            worst_funceq(&twisted, settings),
            threshold("funceq_twist_rel"),
        ));
    }
    Ok(())
}

/// Zeros of the Hardy function from sign changes on a grid of step 0.01,
/// refined by the Illinois variant of regula falsi.
pub fn fine_grid_zeros(f: &Newform, t_max: f64, settings: &EvalSettings) -> Result<Vec<f64>> {
    let h = 0.01;
    let steps = (t_max / h).floor() as usize;
    let z = |t: f64| hardy_z(f, t, settings);
    let mut out = Vec::new();
    let mut prev = (h, z(h)?);
    for i in 2..=steps {
        let t = i as f64 * h;
        let cur = (t, z(t)?);
        if prev.1 == 0.0 {
            out.push(prev.0);
        } else if prev.1.signum() != cur.1.signum() && cur.1 != 0.0 {
            let (mut a, mut b) = (prev, cur);
            let mut side = 0;
            for _ in 0..60 {
                let c = (a.0 * b.1 - b.0 * a.1) / (b.1 - a.1);
                let fc = z(c)?;
                if fc == 0.0 || (b.0 - a.0).abs() < 1e-13 {
                    a = (c, fc);
                    b = (c, fc);
                    break;
                }
                if fc.signum() == b.1.signum() {
                    b = (c, fc);
                    if side == -1 {
                        a.1 /= 2.0;
                    }
                    side = -1;
                } else {
                    a = (c, fc);
                    if side == 1 {
                        b.1 /= 2.0;
                    }
                    side = 1;
                }
            }
            out.push(if a.1.abs() < b.1.abs() { a.0 } else { b.0 });
        }
        prev = cur;
    }
    Ok(out)
}

fn zero_rows(zeros: &[ZeroRecord]) -> Value {
    json!(zeros
        .iter()
        .map(|z| json!({ "t": z.t, "refinement_error": z.refinement_error, "winding": z.winding }))
        .collect::<Vec<_>>())
}

fn zeros(f: &Newform, cfg: &VerifyConfig, settings: &EvalSettings, out: &mut SuiteOutput) -> Result<()> {
    let scan = scan_zeros(f, 0.0, cfg.tmax, 0.1, settings)?;
    let found: Vec<ZeroRecord> = scan.zeros.into_iter().filter(|z| z.t > 0.0).collect();
    out.data.insert("zeros".into(), zero_rows(&found));
    let worst_ref = found.iter().map(|z| z.refinement_error).fold(0.0, f64::max);
    out.push(Check::new("refinement_error", Relation::Below, worst_ref, threshold("zero_refinement")));
    let not_simple = found.iter().filter(|z| z.winding != 1).count();
    out.push(Check::new("windings_not_one", Relation::Equal, not_simple as f64, 0.0));
    if f.is_self_dual() {
        let oracle = fine_grid_zeros(f, cfg.tmax, settings)?;
        out.data.insert("oracle".into(), json!(oracle));
        let value = if oracle.len() == found.len() {
            found.iter().zip(&oracle).map(|(z, o)| (z.t - o).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        out.push(Check::new("fine_grid_oracle", Relation::Below, value, threshold("zero_oracle")));
    }
    let count = count_zeros(f, cfg.tmax, settings)?;
    out.data.insert("box_count".into(), json!(count));
    out.push(Check::new(
        "box_count_minus_scan",
        Relation::Equal,
        count.count as f64 - found.len() as f64,
        0.0,
    ));
    Ok(())
}

fn dseries(f: &Newform, cfg: &VerifyConfig, settings: &EvalSettings, out: &mut SuiteOutput) -> Result<()> {
    let n = f.n_max().min(10_000);
    let c = d_coefficients(f, n)?;
    for s in [C64::new(8.0, 0.0), C64::new(8.0, 5.0)] {
        let series: C64 = (1..=n).map(|m| c.get(m) * (-s * (m as f64).ln()).exp()).sum();
        let diff = d_value(f, s, settings).map(|v| (v - series).norm());
        out.push(Check::from_result(
            format!("d_overlap_s_{}_{}i", s.re, s.im),
            Relation::Below,
            diff,
            threshold("d_overlap"),
        ));
    }
    let scan = scan_zeros(f, 0.0, cfg.tmax.max(12.0), 0.1, settings)?;
    match scan.zeros.iter().find(|z| z.t > 0.0) {
        Some(z) => out.push(Check::from_result(
            "laurent_first_zero_4_directions",
            Relation::Below,
            laurent_check(f, z, 1e-3, settings),
            threshold("laurent"),
        )),
        None => out.push(Check::failed(
            "laurent_first_zero_4_directions",
            Relation::Below,
            threshold("laurent"),
            &Error::Precondition("no zero found for the Laurent check".into()),
        )),
    }
    Ok(())
}

/// |D_f(s₀ + h, 1/q)|·h for h = 1e−2, 1e−3, 1e−4.
pub fn pole_profile(f: &Newform, q: u64, s0: C64, settings: &EvalSettings) -> Result<Vec<f64>> {
    [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&h| Ok(d_additive_via_characters(f, q, s0 + C64::new(h, 0.0), settings)?.norm() * h))
        .collect()
}

fn poles(f: &Newform, cfg: &VerifyConfig, settings: &EvalSettings, out: &mut SuiteOutput) -> Result<()> {
    let mut rows = Vec::new();
    for &q in &cfg.qs {
        let lf = local_factor(f, q)?;
        if lf.is_square {
            rows.push(json!({ "q": q, "is_square": true }));
            continue;
        }
        let lq = (q as f64).ln();
        let s0 = C64::new((f.weight() as f64 - 1.0) / 2.0, lf.theta / lq);
        let nearest = local_zeros(&lf, s0.im - 1.0, s0.im + 1.0)
            .into_iter()
            .map(|z| (z.s - s0).norm())
            .fold(f64::INFINITY, f64::min);
        out.push(Check::new(
            format!("local_zero_match_q{q}"),
            Relation::Below,
            nearest,
            threshold("local_zero_match"),
        ));
        match pole_profile(f, q, s0, settings) {
            Ok(scaled) => {
                let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
                rows.push(json!({ "q": q, "s0": [s0.re, s0.im], "scaled": scaled }));
                out.push(Check::new(format!("pole_window_q{q}"), Relation::Below, hi / lo, threshold("pole_window")));
            }
            Err(e) => out.push(Check::failed(format!("pole_window_q{q}"), Relation::Below, threshold("pole_window"), &e)),
        }
    }
    out.data.insert("poles".into(), json!(rows));
    Ok(())
}

/// Heights for the residual table: 5, 10, … below T, then T.
fn identity_heights(t: f64) -> Vec<f64> {
    let mut hs: Vec<f64> = (1..).map(|i| 5.0 * i as f64).take_while(|&h| h < t).collect();
    hs.push(t);
    hs
}

fn identity(f: &Newform, cfg: &VerifyConfig, settings: &EvalSettings, out: &mut SuiteOutput) -> Result<()> {
    let z = UpperHalfPoint::new(cfg.alpha.clone(), cfg.y)?;
    let ctx = IdentityContext::new(f, f.n_max(), 0, cfg.tol, settings)?;
    let all = ResidueSet::compute(f, cfg.t, 8.0, settings)?;
    let mut table = Vec::new();
    let mut rows: Vec<(f64, f64, Option<f64>)> = Vec::new();
    for h in identity_heights(all.t) {
        let r = all.restrict(h)?;
        let res = ctx.terms(z.z(), &r)?.residual;
        let omitted = r.first_omitted_magnitude(z.z());
        table.push(json!({ "T": r.t, "zeros": r.zeros.len(), "residual": res, "first_omitted": omitted }));
        rows.push((r.t, res, omitted));
    }
    out.data.insert("residual_table".into(), json!(table));
    let worst_growth = rows.windows(2).map(|w| w[1].1 / w[0].1).fold(0.0, f64::max);
    out.push(Check::new("monotone_in_T_max_ratio", Relation::AtMost, worst_growth, 1.1));

    let t_hi = all.t;
    let t_lo = t_hi - 10.0;
    if t_lo > 0.0 {
        let lo = all.restrict(t_lo)?;
        let r_lo = ctx.terms(z.z(), &lo)?.residual;
        let r_hi = rows.last().map(|r| r.1).unwrap_or(f64::NAN);
        out.push(Check::new(
            format!("residual_T{t_hi}_below_T{}", lo.t),
            Relation::Below,
            r_hi / r_lo,
            1.0,
        ));
        for (name, set, res) in [("lo", &lo, r_lo), ("hi", &all, r_hi)] {
            if let Some(o) = set.first_omitted_magnitude(z.z()) {
                out.push(Check::new(
                    format!("omitted_factor_{name}_T{}", set.t),
                    Relation::AtMost,
                    (res / o).max(o / res),
                    threshold("identity_omitted_factor"),
                ));
            }
        }
        if let Some(next) = lo.omitted.first() {
            let mid = (lo.t + next.t.abs()) / 2.0;
            let r_mid = ctx.terms(z.z(), &all.restrict(mid)?)?.residual;
            out.push(Check::new(
                format!("constant_between_T{}_and_T{mid:.4}", lo.t),
                Relation::Below,
                (r_mid - r_lo).abs(),
                threshold("identity_constancy"),
            ));
        }
    }
    Ok(())
}

fn ibp(f: &Newform, cfg: &VerifyConfig, out: &mut SuiteOutput) -> Result<()> {
    let alpha = rat_f64(&cfg.alpha);
    let s = C64::new(cfg.s, 0.0);
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for m in 1..=4 {
        for n in 1..=10 {
            let r = ibp_expansion_check(f.weight(), alpha, s, m, n, cfg.tol)?;
            rows.push(json!({ "m": m, "n": n, "residual": r }));
            worst = worst.max(r);
        }
    }
    out.data.insert("ibp".into(), json!(rows));
    out.push(Check::new("ibp_m_le_4_n_le_10", Relation::Below, worst, threshold("ibp")));
    let mellin = phi_mellin(f.weight(), s, cfg.tol)
        .and_then(|q| Ok((q - phi_mellin_closed(f.weight(), s)?).norm()));
    out.push(Check::from_result(
        format!("phi_mellin_trigamma_s{}", cfg.s),
        Relation::Below,
        mellin,
        threshold("phi_mellin"),
    ));
    Ok(())
}

fn expansion(f: &Newform, cfg: &VerifyConfig, settings: &EvalSettings, out: &mut SuiteOutput) -> Result<()> {
    let m = cfg.m;
    let alpha = rat_f64(&cfg.expansion_alpha);
    out.push(Check::new(
        format!("fbar_kernel_exact_m_le_{m}"),
        Relation::Equal,
        fbar_kernel_check(f.weight(), m) as u8 as f64,
        1.0,
    ));
    let ctx = IdentityContext::new(f, f.n_max(), (m + 2) as u32, cfg.tol, settings)?;
    let mut slopes = Vec::new();
    for order in [m, m + 1, m + 2] {
        match fbar_slope(&ctx, &cfg.expansion_alpha, order) {
            Ok(r) => {
                out.push(Check::new(format!("fbar_slope_M{order}"), Relation::AtLeast, r.slope, r.required));
                slopes.push(json!(r));
            }
            Err(e) => out.push(Check::failed(format!("fbar_slope_M{order}"), Relation::AtLeast, order as f64, &e)),
        }
    }
    out.data.insert("fbar".into(), json!(slopes));
    let residues = ResidueSet::compute(f, cfg.t, 8.0, settings)?;
    let fit = b_taylor_fit(&ctx, alpha, m, &residues);
    out.push(Check::new(format!("b_taylor_slope_M{m}"), Relation::AtLeast, fit.slope, fit.required));
    out.data.insert("b_taylor".into(), json!(fit));
    let g = g_decay_check(&ctx, &cfg.expansion_alpha, m, &residues)?;
    out.push(Check::new("g_at_y4", Relation::Below, g.g_at_4, threshold("g_large_y")));
    out.push(Check::new(format!("g_small_y_slope_M{m}"), Relation::AtLeast, g.slope.slope, g.slope.required));
    out.data.insert("g".into(), json!(g));
    let s = C64::new(f.weight() as f64 + 1.5, 0.0);
    let am = a_mellin_expansion_check(f, &cfg.expansion_alpha, s, 2, MELLIN_Y_MIN, cfg.tol.max(1e-10));
    if let Ok(r) = &am {
        out.data.insert("a_mellin".into(), json!(r));
    }
    out.push(Check::from_result(
        format!("a_mellin_s{}_m2", s.re),
        Relation::Below,
        am.map(|r| r.residual),
        threshold("a_mellin"),
    ));
    Ok(())
}

fn rankin(f: &Newform, cfg: &VerifyConfig, out: &mut SuiteOutput) -> Result<()> {
    let mean = rankin_average(f, cfg.rankin_x)?;
    out.push(Check::new("rankin_mean_above", Relation::Above, mean, threshold("rankin_low")));
    out.push(Check::new("rankin_mean_below", Relation::Below, mean, threshold("rankin_high")));
    let ab = abundance_report(f, cfg.rankin_x)?;
    out.data.insert("abundance".into(), json!(ab));
    out.push(Check::new(
        "strict_deligne_fraction",
        Relation::AtLeast,
        ab.fraction,
        threshold("deligne_fraction"),
    ));
    Ok(())
}

fn rat_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

