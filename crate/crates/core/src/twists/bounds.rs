//! Explicit majorants |coeff(n)| ≤ C·n^e·(log n)^L for the coefficients of
//! L_f and D_f, and the series tails they imply.

use crate::newform::Newform;
use crate::primes::primes_up_to;
use crate::{Error, Result};

/// Smallest C with d_r(n) ≤ C·n^δ for every n ≥ 1, where d_r counts ordered
/// factorisations into r factors: C = Π_p max_a binom(a+r−1, r−1)·p^{−aδ}.
pub fn divisor_bound_constant(r: u32, delta: f64) -> f64 {
    assert!(r >= 1 && delta > 0.0);
    assert!((r as f64).powf(1.0 / delta) < 1e8, "delta too small for a prime sieve");
    let limit = (r as f64).powf(1.0 / delta).ceil() as usize;
    let mut c = 1.0;
    for p in primes_up_to(limit) {
        let pd = (p as f64).powf(delta);
        let (mut best, mut cur, mut a) = (1.0f64, 1.0f64, 0u32);
        // binom(a+r−1, r−1) grows by (a+r)/(a+1) per step
        while (a + r) as f64 / (a + 1) as f64 > pd || a < 2 {
            cur *= (a + r) as f64 / (a + 1) as f64 / pd;
            best = best.max(cur);
            a += 1;
            if a > 200 {
                break;
            }
        }
        c *= best;
    }
    c
}

/// |coeff(n)| ≤ c·n^exponent·(ln n)^log_power for n ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffBound {
    pub c: f64,
    pub exponent: f64,
    pub log_power: i32,
}

impl CoeffBound {
    /// |a(n)| ≤ d(n)n^{(k−1)/2} ≤ C₂(δ)n^{(k−1)/2+δ}, valid under Deligne.
    pub fn l_coeffs(f: &Newform, delta: f64) -> Result<Self> {
        require_deligne(f)?;
        Ok(Self {
            c: divisor_bound_constant(2, delta),
            exponent: (f.weight() as f64 - 1.0) / 2.0 + delta,
            log_power: 0,
        })
    }

    /// c = a * (ℓ·log²) with |ℓ(p^m)| ≤ 2p^{m(k−1)/2}/m, so that
    /// |c(n)| ≤ 2n^{(k−1)/2}(log n)²·d₃(n).
    pub fn d_coeffs(f: &Newform, delta: f64) -> Result<Self> {
        require_deligne(f)?;
        Ok(Self {
            c: 2.0 * divisor_bound_constant(3, delta),
            exponent: (f.weight() as f64 - 1.0) / 2.0 + delta,
            log_power: 2,
        })
    }

    pub fn at(&self, n: f64) -> f64 {
        self.c * n.powf(self.exponent) * n.ln().max(0.0).powi(self.log_power)
    }

    /// Σ_{n>N} bound(n)·n^{−σ} by comparison with ∫_N^∞, valid once the
    /// summand decreases (N ≥ e^{L/a}); infinite when σ − e ≤ 1.
    pub fn dirichlet_tail(&self, n_cut: usize, sigma: f64) -> f64 {
        let a = sigma - self.exponent;
        if a <= 1.0 {
            return f64::INFINITY;
        }
        let n = (n_cut as f64).max((self.log_power as f64 / a).exp()).max(1.0);
        let l = n.ln();
        let b = a - 1.0;
        let head = n.powf(-b);
        let integral = match self.log_power {
            0 => head / b,
            1 => head * (l / b + 1.0 / (b * b)),
            _ => head * (l * l / b + 2.0 * l / (b * b) + 2.0 / (b * b * b)),
        };
        let skipped: f64 = (n_cut + 1..=(n.ceil() as usize))
            .map(|m| self.at(m as f64) * (m as f64).powf(-sigma))
            .sum();
        self.c * integral + skipped
    }

    /// Σ_{n>N} bound(n)·e^{−λn}, summed term by term until the remainder is
    /// below 1e−17 of the running total.
    pub fn exponential_tail(&self, n_cut: usize, lambda: f64) -> Result<f64> {
        let peak = (self.exponent + self.log_power as f64) / lambda;
        let mut total = 0.0;
        let mut n = n_cut + 1;
        loop {
            let term = self.at(n as f64) * (-lambda * n as f64).exp();
            total += term;
            let past_peak = n as f64 > peak + 1.0;
            // remaining terms fall off at least geometrically past this point
            let ratio = ((n + 1) as f64 / n as f64).powf(self.exponent + self.log_power as f64)
                * (-lambda).exp();
            if past_peak && ratio < 1.0 && term / (1.0 - ratio) <= 1e-17 * total.max(1e-300) {
                return Ok(total + term * ratio / (1.0 - ratio));
            }
            if past_peak && term == 0.0 {
                return Ok(total);
            }
            n += 1;
            if n > n_cut + 50_000_000 {
                return Err(Error::Precondition(format!(
                    "exponential decay rate {lambda:e} too small for a tail bound"
                )));
            }
        }
    }

    /// Smallest N with Σ_{n>N} bound(n)·w(n)·e^{−λn} ≤ tol, and that tail,
    /// for a non-increasing weight w ≤ w(1).
    pub fn exponential_cutoff<W: Fn(f64) -> f64>(&self, lambda: f64, weight: W, tol: f64) -> Result<(usize, f64)> {
        let growth = self.exponent + self.log_power as f64;
        let peak = growth / lambda;
        let mut terms = Vec::new();
        let mut n = 1usize;
        let rest = loop {
            let term = self.at(n as f64) * weight(n as f64) * (-lambda * n as f64).exp();
            terms.push(term);
            let ratio = ((n + 1) as f64 / n as f64).powf(growth) * (-lambda).exp();
            if n as f64 > peak + 1.0 && ratio < 1.0 && term * ratio / (1.0 - ratio) <= tol * 1e-3 {
                break term * ratio / (1.0 - ratio);
            }
            n += 1;
            if n > 50_000_000 {
                return Err(Error::Precondition(format!(
                    "exponential decay rate {lambda:e} too small for a cutoff"
                )));
            }
        };
        let mut tail = rest;
        let mut cut = terms.len();
        while cut > 0 && tail + terms[cut - 1] <= tol {
            tail += terms[cut - 1];
            cut -= 1;
        }
        Ok((cut, tail))
    }
}

/// The best tail over δ ∈ {0.15, 0.2, …, 0.5}.
pub fn best_dirichlet_tail<F: Fn(f64) -> Result<CoeffBound>>(
    make: F,
    n_cut: usize,
    sigma: f64,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for i in 3..=10 {
        let b = make(0.05 * i as f64)?;
        best = best.min(b.dirichlet_tail(n_cut, sigma));
    }
    Ok(best)
}

fn require_deligne(f: &Newform) -> Result<()> {
    match f.deligne_violations().first() {
        Some(&p) => Err(Error::DeligneViolation(p)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::d_coefficients;
    use crate::newform::delta_coefficients;
    use crate::primes::divisor_count;

    fn d3(n: u64) -> u64 {
        (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| divisor_count(n / d)).sum()
    }

    #[test]
    fn divisor_constants_hold() {
        for &delta in &[0.25, 0.5] {
            let c2 = divisor_bound_constant(2, delta);
            let c3 = divisor_bound_constant(3, delta);
            for n in 1..3000u64 {
                let nd = (n as f64).powf(delta);
                assert!(divisor_count(n) as f64 <= c2 * nd * (1.0 + 1e-12));
                assert!(d3(n) as f64 <= c3 * nd * (1.0 + 1e-12));
            }
        }
        // d(n) ≤ √(3n), with equality at n = 12
        assert!((divisor_bound_constant(2, 0.5) - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn delta_coefficients_obey_bounds() {
        let f = delta_coefficients(2000).unwrap();
        let c = d_coefficients(&f, 2000).unwrap();
        let lb = CoeffBound::l_coeffs(&f, 0.25).unwrap();
        let db = CoeffBound::d_coeffs(&f, 0.25).unwrap();
        for n in 1..=2000 {
            assert!(f.a(n).norm() <= lb.at(n as f64));
            assert!(c.get(n).norm() <= db.at(n as f64) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn tails_dominate_partial_sums() {
        let b = CoeffBound { c: 1.0, exponent: 0.0, log_power: 0 };
        // Σ_{n>10} n^{−2} = ψ′(11) ≈ 0.0951663
        let t = b.dirichlet_tail(10, 2.0);
        assert!((0.0951663..0.11).contains(&t));
        let e = b.exponential_tail(0, 1.0).unwrap();
        let exact = 1.0 / (1f64.exp() - 1.0);
        assert!((e - exact).abs() < 1e-12);
        assert_eq!(b.dirichlet_tail(10, 1.0), f64::INFINITY);
        let (cut, tail) = b.exponential_cutoff(1.0, |_| 1.0, 1e-6).unwrap();
        // Σ_{n>N} e^{−n} = e^{−N}/(e − 1)
        let exact = |n: usize| (-(n as f64)).exp() / (1f64.exp() - 1.0);
        assert!(exact(cut) <= 1e-6 && exact(cut - 1) > 1e-6);
        assert!(tail >= exact(cut) * (1.0 - 1e-9) && tail <= 1e-6);
    }
}
