//! Evaluation of Λ_f(s), L_f(s) and its first two derivatives, D_f(s),
//! the q-deprived D_f(s, χ₀), and the residuals of the functional equation
//! and its second logarithmic derivative.
//!
//! Λ_f is computed from the incomplete-gamma splitting of its Mellin integral
//! at a split point y₀ in the right half-plane:
//!
//! Λ_f(s) = Σ a(n)(2πn)^{−s}Γ(s, 2πny₀) + εN^{k/2−s} Σ ā(n)(2πn)^{s−k}Γ(k−s, 2πn/(Ny₀)).
//!
//! With |y₀| = 1/√N and y₀ real this is the symmetric split. For large |Im s|
//! the split point is rotated to arg y₀ = φ with φ → ±π/2, which keeps every
//! term of the natural size e^{−φ Im s} instead of O(1) and avoids cancelling
//! down to |Λ| ≈ e^{−π|Im s|/2}.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::newform::Newform;
use crate::special::{gamma, rgamma, trigamma, upper_gamma_bound, upper_incomplete_gamma_complex};
use crate::{ensure_finite, CompensatedSum, Error, Result, C64};

/// Numerical settings for Λ_f and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    /// Terms per incomplete-gamma sum; `None` picks the smallest cutoff whose
    /// tail bound meets `target_tol`.
    pub series_cutoff: Option<usize>,
    pub cauchy_radius: f64,
    pub cauchy_nodes: usize,
    /// Tail tolerance, in units of the term scale e^{−φ Im s}.
    pub target_tol: f64,
    /// |y₀|·√N.
    pub split_scale: f64,
    /// (π/2 − |φ|)·|Im s| once rotation is active; bounds the relative
    /// cancellation factor by e^{margin}.
    pub rotation_margin: f64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            series_cutoff: None,
            cauchy_radius: 0.25,
            cauchy_nodes: 64,
            target_tol: 1e-18,
            split_scale: 1.0,
            rotation_margin: 2.0,
        }
    }
}

/// Λ_f(s) with the cutoff actually used and its tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaValue {
    pub value: C64,
    pub cutoff: usize,
    pub tail_bound: f64,
}

/// L, L′, L″ at a point, and max|L| on the Cauchy circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LDerivatives {
    pub l: C64,
    pub l1: C64,
    pub l2: C64,
    pub scale: f64,
}

fn rotation_angle(t: f64, margin: f64) -> f64 {
    if t.abs() * FRAC_PI_2 <= margin {
        0.0
    } else {
        t.signum() * (FRAC_PI_2 - margin / t.abs())
    }
}

/// Upper bound for the n-th terms of both sums, divided by e^{−φ Im s}.
struct TailModel {
    half_weight: f64,
    sigma: f64,
    k: f64,
    cos_phi: f64,
    r1: f64,
    r2: f64,
    level_factor: f64,
}

impl TailModel {
    fn term(&self, n: usize) -> f64 {
        let n = n as f64;
        // |a(n)| ≤ d(n) n^{(k−1)/2} ≤ 2 n^{k/2}
        let coeff = 2.0 * n.powf(self.half_weight);
        let part = |sigma: f64, r: f64| {
            let x = TAU * n * r * self.cos_phi;
            (TAU * n).powf(-sigma) * self.cos_phi.powf(-sigma) * upper_gamma_bound(sigma, x)
        };
        coeff * (part(self.sigma, self.r1) + self.level_factor * part(self.k - self.sigma, self.r2))
    }

    /// Smallest cutoff with tail ≤ tol, and that tail; or the tail of a fixed cutoff.
    fn cutoff(&self, tol: f64, fixed: Option<usize>) -> Result<(usize, f64)> {
        const CAP: usize = 5_000_000;
        let mut terms = Vec::new();
        let mut n = 1;
        let remainder = loop {
            let b = self.term(n);
            terms.push(b);
            if n > CAP {
                return Err(Error::TailBound { bound: f64::INFINITY, tol });
            }
            if n > 2 && b.is_finite() {
                let prev = terms[n - 2];
                let ratio = b / prev;
                let past_fixed = fixed.is_none_or(|c| n > c);
                if ratio < 0.9 && b < tol * 1e-3 && past_fixed {
                    break b * ratio / (1.0 - ratio);
                }
            }
            n += 1;
        };
        // tails[i] = Σ_{m > i} terms[m−1] + remainder
        let mut tails = vec![0.0; terms.len() + 1];
        tails[terms.len()] = remainder;
        for i in (0..terms.len()).rev() {
            tails[i] = tails[i + 1] + terms[i];
        }
        match fixed {
            Some(c) => {
                let t = tails[c.min(terms.len())];
                if t > tol {
                    return Err(Error::TailBound { bound: t, tol });
                }
                Ok((c, t))
            }
            None => {
                let c = tails.iter().position(|&t| t <= tol).expect("last tail is below tol");
                Ok((c.max(1), tails[c.max(1)]))
            }
        }
    }
}

/// Λ_f(s) together with the cutoff and tail bound used.
pub fn lambda_with_diagnostics(f: &Newform, s: C64, settings: &EvalSettings) -> Result<LambdaValue> {
    if let Some(&p) = f.deligne_violations().first() {
        return Err(Error::DeligneViolation(p));
    }
    let k = f.weight() as f64;
    let level = f.level() as f64;
    let phi = rotation_angle(s.im, settings.rotation_margin);
    let modulus = settings.split_scale / level.sqrt();
    let y0 = C64::from_polar(modulus, phi);
    let model = TailModel {
        half_weight: k / 2.0,
        sigma: s.re,
        k,
        cos_phi: phi.cos(),
        r1: modulus,
        r2: 1.0 / (level * modulus),
        level_factor: level.powf(k / 2.0 - s.re),
    };
    let (cutoff, tail_bound) = model.cutoff(settings.target_tol, settings.series_cutoff)?;
    if cutoff > f.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: cutoff,
            available: f.n_max(),
        });
    }

    let sk = C64::new(k, 0.0) - s;
    let inv = 1.0 / (level * y0);
    let mut first = CompensatedSum::new();
    let mut second = CompensatedSum::new();
    for n in 1..=cutoff {
        let a = f.a(n);
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        let w = TAU * n as f64;
        let lw = w.ln();
        first.add(a * (-s * lw).exp() * upper_incomplete_gamma_complex(s, w * y0)?);
        second.add(a.conj() * (-sk * lw).exp() * upper_incomplete_gamma_complex(sk, w * inv)?);
    }
    let factor = f.root_number() * ((k / 2.0 - s) * level.ln()).exp();
    let value = ensure_finite(first.value() + factor * second.value(), "lambda_complete")?;
    Ok(LambdaValue {
        value,
        cutoff,
        tail_bound,
    })
}

/// The completed L-function Λ_f(s) = (2π)^{−s}Γ(s)L_f(s).
pub fn lambda_complete(f: &Newform, s: C64, settings: &EvalSettings) -> Result<C64> {
    Ok(lambda_with_diagnostics(f, s, settings)?.value)
}

/// L_f(s) = (2π)^s Λ_f(s)/Γ(s).
pub fn l_value(f: &Newform, s: C64, settings: &EvalSettings) -> Result<C64> {
    let lam = lambda_complete(f, s, settings)?;
    ensure_finite((s * TAU.ln()).exp() * lam * rgamma(s), "l_value")
}

/// g(s), g′(s), g″(s) by the trapezoid rule for Cauchy's integral formula on
/// |w − s| = radius, plus max|g| on the circle.
pub fn cauchy_derivatives<G>(mut g: G, s: C64, radius: f64, nodes: usize) -> Result<([C64; 3], f64)>
where
    G: FnMut(C64) -> Result<C64>,
{
    let mut acc = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    let mut scale: f64 = 0.0;
    for m in 0..nodes {
        let theta = TAU * m as f64 / nodes as f64;
        let u = C64::from_polar(1.0, theta);
        let v = g(s + radius * u)?;
        scale = scale.max(v.norm());
        acc[0].add(v);
        acc[1].add(v * u.conj());
        acc[2].add(v * u.conj() * u.conj());
    }
    let n = nodes as f64;
    Ok((
        [
            acc[0].value() / n,
            acc[1].value() / (n * radius),
            acc[2].value() * 2.0 / (n * radius * radius),
        ],
        scale,
    ))
}

/// (L, L′, L″) at s; L itself is evaluated directly, the derivatives on the
/// Cauchy circle.
pub fn l_derivatives(f: &Newform, s: C64, settings: &EvalSettings) -> Result<LDerivatives> {
    let ([_, l1, l2], scale) = cauchy_derivatives(
        |w| l_value(f, w, settings),
        s,
        settings.cauchy_radius,
        settings.cauchy_nodes,
    )?;
    Ok(LDerivatives {
        l: l_value(f, s, settings)?,
        l1,
        l2,
        scale,
    })
}

fn log_second_derivative_times(m: C64, m1: C64, m2: C64, scale: f64, what: &'static str, s: C64) -> Result<C64> {
    if m.norm() < 1e-8 * scale {
        return Err(Error::Pole {
            function: what,
            re: s.re,
            im: s.im,
        });
    }
    ensure_finite((m2 * m - m1 * m1) / m, what)
}

/// D_f(s) = L_f(s)·(log L_f)″(s) = (L″L − L′²)/L.
pub fn d_value(f: &Newform, s: C64, settings: &EvalSettings) -> Result<C64> {
    let d = l_derivatives(f, s, settings)?;
    log_second_derivative_times(d.l, d.l1, d.l2, d.scale, "d_value", s)
}

/// Δ_f(s) = (2π)^{−s}Γ(s)D_f(s).
pub fn completed_d(f: &Newform, s: C64, settings: &EvalSettings) -> Result<C64> {
    let g = gamma(s)?;
    ensure_finite((-s * TAU.ln()).exp() * g * d_value(f, s, settings)?, "completed_d")
}

/// E_q(s) = 1 − a(q)q^{−s} + ξ(q)q^{k−1−2s} and its first two derivatives.
pub fn local_factor_derivatives(f: &Newform, q: u64, s: C64) -> [C64; 3] {
    let lq = (q as f64).ln();
    let a = f.a(q as usize);
    let u = a * (-s * lq).exp();
    let v = f.xi(q) * ((C64::new(f.weight() as f64 - 1.0, 0.0) - 2.0 * s) * lq).exp();
    [
        1.0 - u + v,
        lq * (u - 2.0 * v),
        lq * lq * (-u + 4.0 * v),
    ]
}

/// D_f(s, χ₀) for χ₀ mod q: the D-series of L^{(q)} = E_q·L_f, whose
/// coefficients are c(n)χ₀(n).
pub fn d_chi0(f: &Newform, q: u64, s: C64, settings: &EvalSettings) -> Result<C64> {
    if !crate::primes::is_prime(q) || f.level().is_multiple_of(q) {
        return Err(Error::Precondition(format!("q = {q} must be a prime not dividing the level")));
    }
    if q as usize > f.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: q as usize,
            available: f.n_max(),
        });
    }
    let [e0, e1, e2] = local_factor_derivatives(f, q, s);
    let d = l_derivatives(f, s, settings)?;
    let m = e0 * d.l;
    let m1 = e1 * d.l + e0 * d.l1;
    let m2 = e2 * d.l + 2.0 * e1 * d.l1 + e0 * d.l2;
    let k = f.weight() as f64;
    let qf = q as f64;
    let e_scale = 1.0 + f.a(q as usize).norm() * qf.powf(-s.re) + qf.powf(k - 1.0 - 2.0 * s.re);
    log_second_derivative_times(m, m1, m2, d.scale * e_scale, "d_chi0", s)
}

/// |Λ_f(s) − εN^{k/2−s}Λ_f̄(k−s)| / max(1, |Λ_f(s)|), with the right side
/// evaluated at split scale 1.25× that of the left so the two are independent.
pub fn funceq_residual(f: &Newform, s: C64, settings: &EvalSettings) -> Result<f64> {
    let lhs = lambda_complete(f, s, settings)?;
    let other = EvalSettings {
        split_scale: settings.split_scale * 1.25,
        ..*settings
    };
    let k = f.weight() as f64;
    let rhs = f.root_number()
        * ((k / 2.0 - s) * (f.level() as f64).ln()).exp()
        * lambda_complete(&f.dual(), C64::new(k, 0.0) - s, &other)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}

/// |Δ_f(s) + Λ_f(s)(ψ′(s) − ψ′(k−s)) − εN^{k/2−s}Δ_f̄(k−s)|.
pub fn dfunceq_residual(f: &Newform, s: C64, settings: &EvalSettings) -> Result<f64> {
    let k = C64::new(f.weight() as f64, 0.0);
    let lhs = completed_d(f, s, settings)?
        + lambda_complete(f, s, settings)? * (trigamma(s)? - trigamma(k - s)?);
    let rhs = f.root_number()
        * ((k / 2.0 - s) * (f.level() as f64).ln()).exp()
        * completed_d(&f.dual(), k - s, settings)?;
    Ok((lhs - rhs).norm())
}

/// True inside the radius-0.3 disks around s = 0, −1, −2, … that residual
/// grids exclude.
pub fn near_trivial_zero(s: C64) -> bool {
    if s.re > 0.3 {
        return false;
    }
    let nearest = s.re.round().min(0.0);
    (s - nearest).norm() < 0.3
}

/// (2π)^{−s}Γ(s): the archimedean factor.
pub fn gamma_factor(s: C64) -> Result<C64> {
    Ok((-s * (2.0 * PI).ln()).exp() * gamma(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newform::delta_coefficients;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn delta_funceq_points() {
        let d = delta_coefficients(400).unwrap();
        let st = EvalSettings::default();
        for s in [c(4.0, 5.0), c(2.0, -30.0), c(10.0, 17.0), c(6.0, 0.0)] {
            let r = funceq_residual(&d, s, &st).unwrap();
            assert!(r < 1e-10, "{s}: {r:e}");
        }
    }

    #[test]
    fn lambda_real_on_critical_line() {
        let d = delta_coefficients(400).unwrap();
        let st = EvalSettings::default();
        for t in [0.0, 3.3, 9.2, 21.0, 40.0] {
            let v = lambda_complete(&d, c(6.0, t), &st).unwrap();
            assert!(v.im.abs() <= 1e-9 * v.norm().max(1e-300), "t={t}: {v}");
        }
    }

    #[test]
    fn l_at_eight_matches_series() {
        // the 10^4-term truncation is itself off by ~1.2e-10
        let d = delta_coefficients(30_000).unwrap();
        let st = EvalSettings::default();
        let series: CompensatedSum = (1..=30_000)
            .map(|n| d.a(n) * (n as f64).powf(-8.0))
            .collect();
        let v = l_value(&d, c(8.0, 0.0), &st).unwrap();
        assert!((v - series.value()).norm() < 1e-10, "{v} vs {}", series.value());
    }

    #[test]
    fn cauchy_on_known_function() {
        let ([g0, g1, g2], _) =
            cauchy_derivatives(|w| Ok((2.0 * w).exp()), c(0.3, 0.1), 0.25, 64).unwrap();
        let e = (2.0 * c(0.3, 0.1)).exp();
        assert!((g0 - e).norm() < 1e-14);
        assert!((g1 - 2.0 * e).norm() < 1e-13);
        assert!((g2 - 4.0 * e).norm() < 1e-12);
        let ([_, h1, h2], _) = cauchy_derivatives(|_| Ok(c(7.0, 0.0)), c(1.0, 1.0), 0.25, 64).unwrap();
        assert!(h1.norm() < 1e-14 && h2.norm() < 1e-13);
    }

    #[test]
    fn fixed_cutoff_too_small_is_rejected() {
        let d = delta_coefficients(100).unwrap();
        let st = EvalSettings {
            series_cutoff: Some(2),
            ..EvalSettings::default()
        };
        assert!(matches!(lambda_complete(&d, c(6.0, 1.0), &st), Err(Error::TailBound { .. })));
        let short = delta_coefficients(3).unwrap();
        assert!(matches!(
            lambda_complete(&short, c(6.0, 1.0), &EvalSettings::default()),
            Err(Error::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn trivial_zero_disks() {
        assert!(near_trivial_zero(c(-1.1, 0.1)));
        assert!(near_trivial_zero(c(0.2, 0.0)));
        assert!(!near_trivial_zero(c(-1.5, 0.0)));
        assert!(!near_trivial_zero(c(2.0, 0.0)));
    }
}
