//! Local Euler factors 1 − a(q)q^{−s} + ξ(q)q^{k−1−2s} at unramified primes:
//! Satake roots, the square test, explicit local zeros, and the
//! Rankin–Selberg average of |a(q)|²/q^{k−1}.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::newform::Newform;
use crate::primes::primes_up_to;
use crate::{Error, Result, C64};

/// The local factor at q with Satake roots α, β of X² − a(q)X + ξ(q)q^{k−1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalFactor {
    pub q: u64,
    pub weight: u32,
    #[serde(serialize_with = "crate::ser_c64")]
    pub a_q: C64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub xi_q: C64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub alpha: C64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub beta: C64,
    /// arg α; in [0, π] for self-dual forms.
    pub theta: f64,
    /// arg β.
    pub theta_beta: f64,
    pub is_square: bool,
    /// Floating-point data only: relative discriminant in [1e−9, 1e−6].
    pub near_square: bool,
    /// Whether the square test was decided in exact integer arithmetic.
    pub exact: bool,
}

/// A zero of a local factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalZero {
    #[serde(serialize_with = "crate::ser_c64")]
    pub s: C64,
    /// 2 when the factor is a square (α = β).
    pub multiplicity: u32,
}

impl LocalFactor {
    /// E_q(s) = 1 − a(q)q^{−s} + ξ(q)q^{k−1−2s}.
    pub fn eval(&self, s: C64) -> C64 {
        let lq = (self.q as f64).ln();
        let u = (-s * lq).exp();
        1.0 - self.a_q * u + self.xi_q * ((self.weight as f64 - 1.0) * lq).exp() * u * u
    }
}

/// Local factor of f at a prime q ∤ N.
pub fn local_factor(f: &Newform, q: u64) -> Result<LocalFactor> {
    if f.level().is_multiple_of(q) {
        return Err(Error::Precondition(format!(
            "q = {q} divides the level; its local factor has degree 1"
        )));
    }
    if !crate::primes::is_prime(q) {
        return Err(Error::Precondition(format!("{q} is not prime")));
    }
    if q as usize > f.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: q as usize,
            available: f.n_max(),
        });
    }
    let k = f.weight();
    let a = f.a(q as usize);
    let xi = f.xi(q);
    let big_q = (q as f64).powf((k as f64 - 1.0) / 2.0);
    // disc = a² − 4ξq^{k−1} = (a − 2r)(a + 2r) with r = √ξ·q^{(k−1)/2}
    let r = xi.sqrt() * big_q;
    let disc = (a - 2.0 * r) * (a + 2.0 * r);
    let root = disc.sqrt();
    let alpha = 0.5 * (a + root);
    let beta = 0.5 * (a - root);

    let exact_int = match f.exact() {
        Some(ex) if f.nebentypus().is_trivial() => Some(ex[q as usize - 1]),
        _ => None,
    };
    let (is_square, near_square) = match exact_int {
        Some(aq) => {
            let a2 = BigInt::from(aq) * BigInt::from(aq);
            (a2 == BigInt::from(4) * BigInt::from(q).pow(k - 1), false)
        }
        None => {
            let rel = disc.norm() / (a.norm().powi(2) + 4.0 * big_q * big_q);
            (rel < 1e-9, (1e-9..=1e-6).contains(&rel))
        }
    };
    let (alpha, beta) = if is_square { (0.5 * a, 0.5 * a) } else { (alpha, beta) };
    Ok(LocalFactor {
        q,
        weight: k,
        a_q: a,
        xi_q: xi,
        alpha,
        beta,
        theta: alpha.arg(),
        theta_beta: beta.arg(),
        is_square,
        near_square,
        exact: exact_int.is_some(),
    })
}

/// All zeros of the local factor with Im s ∈ [t_min, t_max], sorted by
/// ordinate: s = (log γ + 2πim)/log q for γ ∈ {α, β}, m ∈ ℤ.
pub fn local_zeros(lf: &LocalFactor, t_min: f64, t_max: f64) -> Vec<LocalZero> {
    let lq = (lf.q as f64).ln();
    let period = TAU / lq;
    let roots: Vec<(C64, u32)> = if lf.is_square {
        vec![(lf.alpha, 2)]
    } else {
        vec![(lf.alpha, 1), (lf.beta, 1)]
    };
    let mut out = Vec::new();
    if t_min > t_max {
        return out;
    }
    for (g, mult) in roots {
        if g.norm() == 0.0 {
            continue;
        }
        let base = g.ln() / lq;
        let m_lo = ((t_min - base.im) / period).ceil() as i64;
        let m_hi = ((t_max - base.im) / period).floor() as i64;
        for m in m_lo..=m_hi {
            out.push(LocalZero {
                s: base + C64::new(0.0, m as f64 * period),
                multiplicity: mult,
            });
        }
    }
    out.sort_by(|a, b| a.s.im.total_cmp(&b.s.im));
    out
}

fn unramified_primes(f: &Newform, x: u64) -> Result<Vec<u64>> {
    if x as usize > f.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: x as usize,
            available: f.n_max(),
        });
    }
    let primes: Vec<u64> = primes_up_to(x as usize)
        .into_iter()
        .filter(|&p| !f.level().is_multiple_of(p))
        .collect();
    if primes.is_empty() {
        return Err(Error::Precondition(format!("no unramified primes up to {x}: no data")));
    }
    Ok(primes)
}

/// Mean of |a(q)|²/q^{k−1} over primes q ≤ X, q ∤ N.
pub fn rankin_average(f: &Newform, x: u64) -> Result<f64> {
    let primes = unramified_primes(f, x)?;
    let k = f.weight() as i32;
    let terms: Vec<f64> = primes
        .par_iter()
        .map(|&q| f.a(q as usize).norm_sqr() / (q as f64).powi(k - 1))
        .collect();
    Ok(terms.iter().sum::<f64>() / primes.len() as f64)
}

/// Share of primes q ≤ X, q ∤ N with strict Deligne inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Abundance {
    pub x: u64,
    pub primes: usize,
    pub strict: usize,
    pub fraction: f64,
}

pub fn abundance_report(f: &Newform, x: u64) -> Result<Abundance> {
    let primes = unramified_primes(f, x)?;
    let factors = local_factors(f, &primes)?;
    let strict = factors.iter().filter(|lf| !lf.is_square && strict_deligne(f, lf)).count();
    Ok(Abundance {
        x,
        primes: primes.len(),
        strict,
        fraction: strict as f64 / primes.len() as f64,
    })
}

fn strict_deligne(f: &Newform, lf: &LocalFactor) -> bool {
    let k = f.weight();
    match (lf.exact, f.exact()) {
        (true, Some(ex)) => {
            let a = BigInt::from(ex[lf.q as usize - 1]);
            &a * &a < BigInt::from(4) * BigInt::from(lf.q).pow(k - 1)
        }
        _ => lf.a_q.norm() < 2.0 * (lf.q as f64).powf((k as f64 - 1.0) / 2.0) * (1.0 - 1e-12),
    }
}

/// Local factors at the given primes, in input order.
pub fn local_factors(f: &Newform, primes: &[u64]) -> Result<Vec<LocalFactor>> {
    primes.par_iter().map(|&q| local_factor(f, q)).collect()
}

/// CSV with columns q, a_q, theta, is_square, first_zero (the least
/// non-negative local zero ordinate).
pub fn local_factors_csv(f: &Newform, factors: &[LocalFactor]) -> String {
    let mut out = String::from("q,a_q,theta,is_square,first_zero\n");
    for lf in factors {
        let a = match f.exact() {
            Some(ex) => ex[lf.q as usize - 1].to_string(),
            None if lf.a_q.im == 0.0 => format!("{}", lf.a_q.re),
            None => format!("{}{:+}i", lf.a_q.re, lf.a_q.im),
        };
        let period = TAU / (lf.q as f64).ln();
        let first = local_zeros(lf, 0.0, period + 1e-9)
            .first()
            .map(|z| format!("{}", z.s.im))
            .unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{}", lf.q, a, lf.theta, lf.is_square, first);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::DirichletCharacter;
    use crate::newform::{delta_coefficients, hecke_extend};
    use std::collections::BTreeMap;

    #[test]
    fn delta_at_two() {
        let d = delta_coefficients(100).unwrap();
        let lf = local_factor(&d, 2).unwrap();
        let r = 1904f64.sqrt();
        assert!((lf.alpha - C64::new(-12.0, r)).norm() < 1e-12);
        assert!((lf.beta - C64::new(-12.0, -r)).norm() < 1e-12);
        assert!((lf.alpha.norm() - 2f64.powf(5.5)).abs() < 1e-12);
        assert!((lf.theta - r.atan2(-12.0)).abs() < 1e-14);
        assert!((lf.theta - 1.8392).abs() < 1e-4);
        assert!(!lf.is_square && lf.exact);
    }

    #[test]
    fn zeros_at_two() {
        let d = delta_coefficients(10).unwrap();
        let lf = local_factor(&d, 2).unwrap();
        let z = local_zeros(&lf, 0.0, 10.0);
        assert_eq!(z.len(), 2);
        let l2 = 2f64.ln();
        assert!((z[0].s.im - lf.theta / l2).abs() < 1e-12 && (z[0].s.im - 2.6534).abs() < 1e-4);
        assert!((z[1].s.im - (TAU - lf.theta) / l2).abs() < 1e-12 && (z[1].s.im - 6.41136).abs() < 1e-5);
        for zero in &z {
            assert!((zero.s.re - 5.5).abs() < 1e-12);
            assert!(lf.eval(zero.s).norm() < 1e-12);
        }
        let wide = local_zeros(&lf, -30.0, 30.0);
        let from_alpha: Vec<f64> = wide
            .iter()
            .map(|z| z.s.im)
            .filter(|t| ((t * 2f64.ln() - lf.theta) / TAU).fract().abs() < 1e-9)
            .collect();
        for w in from_alpha.windows(2) {
            assert!((w[1] - w[0] - TAU / 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn square_factor_is_double() {
        let k = 4u32;
        let mut primes = BTreeMap::new();
        for p in [2u64, 3, 5, 7] {
            primes.insert(p, C64::new(2.0 * (p as f64).powf(1.5), 0.0));
        }
        let coeffs = hecke_extend(&primes, k, 1, &DirichletCharacter::trivial(1), 8).unwrap();
        let f = Newform::new(k, 1, DirichletCharacter::trivial(1), C64::new(1.0, 0.0), coeffs, "square").unwrap();
        let lf = local_factor(&f, 3).unwrap();
        assert!(lf.is_square && !lf.exact);
        let z = local_zeros(&lf, 0.0, 20.0);
        assert!(!z.is_empty() && z.iter().all(|z| z.multiplicity == 2));
        assert_eq!(abundance_report(&f, 7).unwrap().fraction, 0.0);
    }

    #[test]
    fn rankin_small_cases() {
        let d = delta_coefficients(10).unwrap();
        assert_eq!(rankin_average(&d, 2).unwrap(), 576.0 / 2048.0);
        assert!(rankin_average(&d, 1).is_err());
        assert!(local_factor(&d, 4).is_err());
    }
}
