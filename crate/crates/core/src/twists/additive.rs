//! Additive twists Σ coeff(n)e(αn)n^{−s}, multiplicative twists of D_f, and
//! the character expansion of D_f(s, 1/q) that continues it to the left.

use num_rational::BigRational;
use serde::Serialize;

use super::bounds::{best_dirichlet_tail, CoeffBound};
use super::point::rational_phase;
use crate::character::{character_table, gauss_sum, DirichletCharacter};
use crate::dirichlet::d_coefficients;
use crate::lfunction::{d_chi0, d_value, EvalSettings};
use crate::newform::Newform;
use crate::{CompensatedSum, Error, Result, C64};

/// Which coefficients a twisted series carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesKind {
    /// a(n): L_f(s, α).
    L,
    /// c(n): D_f(s, α).
    D,
}

/// A truncated Dirichlet series and a rigorous bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistValue {
    #[serde(serialize_with = "crate::ser_c64")]
    pub value: C64,
    pub tail_bound: f64,
    pub n_cut: usize,
}

fn series_coeffs(kind: SeriesKind, f: &Newform, n_cut: usize) -> Result<Vec<C64>> {
    if n_cut > f.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: n_cut,
            available: f.n_max(),
        });
    }
    Ok(match kind {
        SeriesKind::L => f.coeffs()[..n_cut].to_vec(),
        SeriesKind::D => d_coefficients(f, n_cut)?.coeffs().to_vec(),
    })
}

fn tail(kind: SeriesKind, f: &Newform, n_cut: usize, sigma: f64) -> Result<f64> {
    match kind {
        SeriesKind::L => best_dirichlet_tail(|d| CoeffBound::l_coeffs(f, d), n_cut, sigma),
        SeriesKind::D => best_dirichlet_tail(|d| CoeffBound::d_coeffs(f, d), n_cut, sigma),
    }
}

fn require_margin(f: &Newform, s: C64) -> Result<()> {
    let edge = f.weight() as f64 / 2.0 + 1.0;
    if s.re <= edge {
        return Err(Error::Precondition(format!(
            "Re s = {} is inside the convergence margin Re s > {edge}",
            s.re
        )));
    }
    Ok(())
}

/// Σ_{n ≤ n_cut} w(n)coeff(n)n^{−s} in increasing n.
fn weighted_sum<W: Fn(u64) -> Result<C64>>(coeffs: &[C64], s: C64, w: W) -> Result<C64> {
    let mut acc = CompensatedSum::new();
    for (i, &c) in coeffs.iter().enumerate() {
        let n = i as u64 + 1;
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        acc.add(c * w(n)? * (-s * (n as f64).ln()).exp());
    }
    Ok(acc.value())
}

/// Σ_{n ≤ n_cut} coeff(n)e(αn)n^{−s}. Refuses when the tail bound exceeds
/// `tail_tol`.
pub fn additive_twist(
    kind: SeriesKind,
    f: &Newform,
    s: C64,
    alpha: &BigRational,
    n_cut: usize,
    tail_tol: f64,
) -> Result<TwistValue> {
    require_margin(f, s)?;
    let tail_bound = tail(kind, f, n_cut, s.re)?;
    if tail_bound > tail_tol {
        return Err(Error::TailBound {
            bound: tail_bound,
            tol: tail_tol,
        });
    }
    let coeffs = series_coeffs(kind, f, n_cut)?;
    let value = weighted_sum(&coeffs, s, |n| rational_phase(alpha, n))?;
    Ok(TwistValue {
        value,
        tail_bound,
        n_cut,
    })
}

fn require_twistable(f: &Newform, chi: &DirichletCharacter) -> Result<()> {
    let q = chi.modulus();
    if chi.is_trivial() {
        return Err(Error::Precondition("character must be nontrivial".into()));
    }
    if !crate::primes::is_prime(q) || f.level().is_multiple_of(q) {
        return Err(Error::Precondition(format!(
            "modulus {q} must be a prime not dividing the level"
        )));
    }
    Ok(())
}

/// D_{f⊗χ}(s) = Σ c_f(n)χ(n)n^{−s}, evaluated by continuation through the
/// twisted newform.
pub fn mult_twist_d(f: &Newform, chi: &DirichletCharacter, s: C64, settings: &EvalSettings) -> Result<C64> {
    require_twistable(f, chi)?;
    d_value(&f.twist(chi)?, s, settings)
}

/// The truncated series Σ_{n ≤ n_cut} c_f(n)χ(n)n^{−s}.
pub fn mult_twist_d_series(f: &Newform, chi: &DirichletCharacter, s: C64, n_cut: usize) -> Result<TwistValue> {
    require_twistable(f, chi)?;
    require_margin(f, s)?;
    let coeffs = series_coeffs(SeriesKind::D, f, n_cut)?;
    Ok(TwistValue {
        value: weighted_sum(&coeffs, s, |n| Ok(chi.eval(n)))?,
        tail_bound: tail(SeriesKind::D, f, n_cut, s.re)?,
        n_cut,
    })
}

/// D_f(s, 1/q) = D_f(s) − (q/(q−1))D_f(s, χ₀) + (1/(q−1))Σ_{χ≠χ₀} τ(χ̄)D_{f⊗χ}(s),
/// valid wherever the constituents are holomorphic.
pub fn d_additive_via_characters(f: &Newform, q: u64, s: C64, settings: &EvalSettings) -> Result<C64> {
    let chars = character_table(q)?;
    if f.level().is_multiple_of(q) {
        return Err(Error::Precondition(format!("{q} divides the level")));
    }
    let qf = q as f64;
    let mut total = d_value(f, s, settings)? - d_chi0(f, q, s, settings)? * (qf / (qf - 1.0));
    let mut twisted = CompensatedSum::new();
    for chi in &chars[1..] {
        twisted.add(gauss_sum(&chi.conj()) * mult_twist_d(f, chi, s, settings)?);
    }
    total += twisted.value() / (qf - 1.0);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunction::l_value;
    use crate::newform::delta_coefficients;
    use std::str::FromStr;

    fn r(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    #[test]
    fn integer_alpha_is_untwisted() {
        let f = delta_coefficients(30_000).unwrap();
        let s = C64::new(8.0, 0.0);
        let v = additive_twist(SeriesKind::L, &f, s, &r("1"), 30_000, 1.0).unwrap();
        let l = l_value(&f, s, &EvalSettings::default()).unwrap();
        assert!((v.value - l).norm() < 1e-9, "{}", (v.value - l).norm());
        assert!(v.tail_bound.is_finite());
    }

    #[test]
    fn alternating_oracle_and_periodicity() {
        let f = delta_coefficients(2000).unwrap();
        let s = C64::new(8.0, 0.0);
        let v = additive_twist(SeriesKind::L, &f, s, &r("1/2"), 2000, 1.0).unwrap();
        let oracle: f64 = (1..=2000)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } * f.a(n).re * (n as f64).powf(-8.0))
            .sum();
        assert!((v.value.re - oracle).abs() < 1e-12 && v.value.im.abs() < 1e-12);
        let s = C64::new(9.0, 3.0);
        let a = additive_twist(SeriesKind::D, &f, s, &r("2/7"), 2000, 1.0).unwrap();
        let b = additive_twist(SeriesKind::D, &f, s, &r("9/7"), 2000, 1.0).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn refusals() {
        let f = delta_coefficients(100).unwrap();
        let s = C64::new(7.0, 0.0);
        assert!(matches!(
            additive_twist(SeriesKind::L, &f, s, &r("1/3"), 100, 1.0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            additive_twist(SeriesKind::D, &f, C64::new(8.0, 0.0), &r("1/3"), 100, 1e-12),
            Err(Error::TailBound { .. })
        ));
        assert!(matches!(
            additive_twist(SeriesKind::L, &f, C64::new(9.0, 0.0), &r("1/3"), 200, 1.0),
            Err(Error::InsufficientCoefficients { .. })
        ));
        let chi = DirichletCharacter::trivial(5);
        assert!(mult_twist_d(&f, &chi, C64::new(8.0, 0.0), &EvalSettings::default()).is_err());
    }

    #[test]
    fn character_expansion_overlaps_series() {
        let f = delta_coefficients(10_000).unwrap();
        let st = EvalSettings::default();
        let s = C64::new(8.0, 0.0);
        let via = d_additive_via_characters(&f, 5, s, &st).unwrap();
        let series = additive_twist(SeriesKind::D, &f, s, &r("1/5"), 10_000, 1.0).unwrap();
        assert!((via - series.value).norm() < 1e-6);

        let chars = character_table(5).unwrap();
        let quad = chars.iter().find(|c| c.is_real() && !c.is_trivial()).unwrap();
        let m = mult_twist_d(&f, quad, s, &st).unwrap();
        let ms = mult_twist_d_series(&f, quad, s, 10_000).unwrap();
        assert!((m - ms.value).norm() < 1e-7);

        let chi = chars.iter().find(|c| !c.is_real()).unwrap();
        let a = mult_twist_d(&f, chi, s, &st).unwrap();
        let b = mult_twist_d(&f, &chi.conj(), s, &st).unwrap();
        assert!((a - b.conj()).norm() < 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn pole_at_local_zero() {
        let f = delta_coefficients(200).unwrap();
        let st = EvalSettings::default();
        let lf = crate::euler_local::local_factor(&f, 2).unwrap();
        let s0 = C64::new(5.5, lf.theta / 2f64.ln());
        let scaled: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&h| d_additive_via_characters(&f, 2, s0 + C64::new(h, 0.0), &st).unwrap().norm() * h)
            .collect();
        let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi / lo < 2.0, "{scaled:?}");
    }
}
