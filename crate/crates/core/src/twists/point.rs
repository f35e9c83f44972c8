//! Points z = α + iy with rational α, and truncation parameters.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::{Error, Result, C64};

/// z = α + iy with α ∈ ℚ^× and y > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperHalfPoint {
    alpha: BigRational,
    y: f64,
}

impl UpperHalfPoint {
    pub fn new(alpha: BigRational, y: f64) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::Precondition("alpha must be nonzero".into()));
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::Precondition(format!("y = {y} must be positive")));
        }
        Ok(Self { alpha, y })
    }

    /// Parses α from "p/q" or an integer.
    pub fn parse(alpha: &str, y: f64) -> Result<Self> {
        let a = BigRational::from_str(alpha.trim())
            .map_err(|_| Error::Precondition(format!("cannot parse rational '{alpha}'")))?;
        Self::new(a, y)
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64().unwrap_or(f64::NAN)
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> C64 {
        C64::new(self.alpha_f64(), self.y)
    }

    /// u = y/α.
    pub fn u(&self) -> f64 {
        self.y / self.alpha_f64()
    }

    /// β = −1/(Nα).
    pub fn beta(&self, level: u64) -> BigRational {
        -(self.alpha.clone() * BigInt::from(level)).recip()
    }

    /// Whether y ≤ |α|/4, the range of the small-y expansions.
    pub fn in_expansion_range(&self) -> bool {
        self.y <= self.alpha_f64().abs() / 4.0
    }

    pub fn require_expansion_range(&self) -> Result<()> {
        if self.in_expansion_range() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "y = {} exceeds |alpha|/4 = {}",
                self.y,
                self.alpha_f64().abs() / 4.0
            )))
        }
    }

    pub fn with_y(&self, y: f64) -> Result<Self> {
        Self::new(self.alpha.clone(), y)
    }

    pub fn sign(&self) -> f64 {
        if self.alpha.is_negative() {
            -1.0
        } else {
            1.0
        }
    }
}

/// Truncation of the residue contour, expansion order and series cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationSpec {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub n_cut: usize,
    pub quad_tol: f64,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self {
            t: 25.0,
            m: 8,
            n_cut: 2000,
            quad_tol: 1e-10,
        }
    }
}

impl TruncationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.quad_tol > 0.0 && self.n_cut > 0) {
            return Err(Error::Precondition(format!("invalid truncation {self:?}")));
        }
        Ok(())
    }
}

/// e(αn) with αn reduced modulo 1 in exact arithmetic, so that the phase is
/// identical for α and α + 1.
pub(crate) fn rational_phase(alpha: &BigRational, n: u64) -> Result<C64> {
    let den = alpha
        .denom()
        .to_u64()
        .ok_or_else(|| Error::Precondition("alpha denominator exceeds 64 bits".into()))?;
    let num = alpha.numer().clone() % BigInt::from(den);
    let num = ((num + BigInt::from(den)) % BigInt::from(den)).to_u64().unwrap_or(0);
    let r = ((num as u128 * (n % den) as u128) % den as u128) as f64;
    Ok(crate::e(r / den as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = UpperHalfPoint::parse("1/3", 0.05).unwrap();
        assert!((p.u() - 0.15).abs() < 1e-15);
        assert_eq!(p.beta(1), BigRational::from_str("-3").unwrap());
        assert!(p.in_expansion_range());
        assert!(!p.with_y(0.1).unwrap().in_expansion_range());
        assert!(UpperHalfPoint::parse("0", 1.0).is_err());
        assert!(UpperHalfPoint::parse("1/3", -1.0).is_err());
        assert_eq!(UpperHalfPoint::parse("-2/5", 1.0).unwrap().sign(), -1.0);
    }

    #[test]
    fn phase_is_periodic_in_alpha() {
        let a = BigRational::from_str("2/7").unwrap();
        let b = BigRational::from_str("9/7").unwrap();
        let c = BigRational::from_str("-5/7").unwrap();
        for n in 1..50 {
            let x = rational_phase(&a, n).unwrap();
            assert_eq!(x, rational_phase(&b, n).unwrap());
            assert_eq!(x, rational_phase(&c, n).unwrap());
            assert!((x - crate::e(2.0 * n as f64 / 7.0)).norm() < 1e-12);
        }
    }
}
