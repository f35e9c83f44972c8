//! Dirichlet characters stored as value tables, and Gauss sums.

use crate::primes::{gcd, is_prime, primitive_root};
use crate::{e, Error, Result, C64};

/// A Dirichlet character χ mod q, stored as χ(0), …, χ(q − 1).
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<C64>,
    is_trivial: bool,
}

impl DirichletCharacter {
    /// The principal character mod q.
    pub fn trivial(q: u64) -> Self {
        assert!(q >= 1, "modulus must be positive");
        let values = (0..q)
            .map(|n| {
                if gcd(n, q) == 1 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        Self {
            modulus: q,
            values,
            is_trivial: true,
        }
    }

    /// Builds a character from its value table and validates it.
    pub fn from_values(values: Vec<C64>) -> Result<Self> {
        let q = values.len() as u64;
        if q == 0 {
            return Err(Error::Invariant("character table is empty".into()));
        }
        let is_trivial = (0..q).all(|n| {
            let v = values[n as usize];
            if gcd(n, q) == 1 {
                (v - 1.0).norm() < 1e-9
            } else {
                v.norm() < 1e-12
            }
        });
        let chi = Self {
            modulus: q,
            values,
            is_trivial,
        };
        chi.validate()?;
        Ok(chi)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        self.is_trivial
    }

    #[inline]
    pub fn eval(&self, n: u64) -> C64 {
        self.values[(n % self.modulus) as usize]
    }

    /// χ(−1) for moduli > 2; ±1.
    pub fn parity(&self) -> C64 {
        self.eval(self.modulus - 1)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.abs() < 1e-12)
    }

    pub fn conj(&self) -> Self {
        Self {
            modulus: self.modulus,
            values: self.values.iter().map(|v| v.conj()).collect(),
            is_trivial: self.is_trivial,
        }
    }

    /// The character n ↦ self(n)·other(n) modulo `modulus`, which must be a
    /// common multiple of both moduli.
    pub fn product_mod(&self, other: &Self, modulus: u64) -> Result<Self> {
        if !modulus.is_multiple_of(self.modulus) || !modulus.is_multiple_of(other.modulus) {
            return Err(Error::Precondition(format!(
                "{modulus} is not a multiple of {} and {}",
                self.modulus, other.modulus
            )));
        }
        let values = (0..modulus)
            .map(|n| {
                let v = self.eval(n) * other.eval(n);
                // Keep exact zeros at residues sharing a factor with the modulus.
                if gcd(n, modulus) == 1 {
                    v
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        Self::from_values(values)
    }

    pub fn pow(&self, e: u32) -> Self {
        let values = self.values.iter().map(|v| v.powu(e)).collect();
        let mut out = Self {
            modulus: self.modulus,
            values,
            is_trivial: self.is_trivial,
        };
        out.is_trivial = (0..out.modulus)
            .all(|n| gcd(n, out.modulus) != 1 || (out.eval(n) - 1.0).norm() < 1e-9);
        out
    }

    /// Checks: χ(n) = 0 iff gcd(n, q) > 1, unit values on the unit circle,
    /// complete multiplicativity on residues.
    pub fn validate(&self) -> Result<()> {
        let q = self.modulus;
        for n in 0..q {
            let v = self.eval(n);
            let unit = gcd(n, q) == 1;
            if unit && (v.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::Invariant(format!(
                    "|χ({n})| = {} is not 1 (mod {q})",
                    v.norm()
                )));
            }
            if !unit && v.norm() > 1e-12 {
                return Err(Error::Invariant(format!(
                    "χ({n}) must vanish since gcd({n}, {q}) > 1"
                )));
            }
        }
        for m in 1..q {
            for n in m..q {
                let lhs = self.eval(m * n);
                let rhs = self.eval(m) * self.eval(n);
                if (lhs - rhs).norm() > 1e-9 {
                    return Err(Error::Invariant(format!(
                        "χ({m}·{n}) ≠ χ({m})χ({n}) mod {q}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// All q − 1 characters mod a prime q, χ₀ first; χ_j(g^i) = e(ij/(q−1)) for
/// the least primitive root g.
pub fn character_table(q: u64) -> Result<Vec<DirichletCharacter>> {
    if !is_prime(q) {
        return Err(Error::Precondition(format!("modulus {q} is not prime")));
    }
    let g = primitive_root(q);
    let order = q - 1;
    let mut index = vec![0u64; q as usize];
    let mut x = 1u64;
    for i in 0..order {
        index[x as usize] = i;
        x = x * g % q;
    }
    Ok((0..order)
        .map(|j| {
            let mut values = vec![C64::new(0.0, 0.0); q as usize];
            for n in 1..q {
                values[n as usize] = e(((index[n as usize] * j) % order) as f64 / order as f64);
            }
            DirichletCharacter {
                modulus: q,
                values,
                is_trivial: j == 0,
            }
        })
        .collect())
}

/// τ(χ) = Σ_{a mod q} χ(a) e(a/q).
pub fn gauss_sum(chi: &DirichletCharacter) -> C64 {
    let q = chi.modulus();
    (0..q).map(|a| chi.eval(a) * e(a as f64 / q as f64)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        let t3 = character_table(3).unwrap();
        assert_eq!(t3.len(), 2);
        assert!(t3[0].is_trivial() && !t3[1].is_trivial());
        assert!((t3[1].eval(2) + 1.0).norm() < 1e-15);

        let t7 = character_table(7).unwrap();
        for chi in &t7 {
            chi.validate().unwrap();
            for n in 1..7 {
                assert!((chi.eval(n).powu(6) - 1.0).norm() < 1e-12);
            }
        }
        assert!(character_table(9).is_err());
    }

    #[test]
    fn orthogonality_mod5() {
        let t = character_table(5).unwrap();
        for (i, a) in t.iter().enumerate() {
            for (j, b) in t.iter().enumerate() {
                let s: C64 = (0..5).map(|n| a.eval(n) * b.eval(n).conj()).sum();
                let expect = if i == j { 4.0 } else { 0.0 };
                assert!((s - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gauss_sums() {
        for q in [3u64, 5, 7, 11, 13] {
            let t = character_table(q).unwrap();
            assert!((gauss_sum(&t[0]) + 1.0).norm() < 1e-12);
            for chi in &t[1..] {
                assert!((gauss_sum(chi).norm() - (q as f64).sqrt()).abs() < 1e-12);
            }
        }
        let quad5 = &character_table(5).unwrap()[2];
        assert!(quad5.is_real());
        let tau = gauss_sum(quad5);
        assert!((tau - C64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn product_and_trivial() {
        let t5 = character_table(5).unwrap();
        let one = DirichletCharacter::trivial(1);
        let lifted = one.product_mod(&t5[1].pow(2), 25).unwrap();
        assert_eq!(lifted.modulus(), 25);
        assert_eq!(lifted.eval(5), C64::new(0.0, 0.0));
        assert!((lifted.eval(2) - t5[1].eval(2).powu(2)).norm() < 1e-12);
        assert!(DirichletCharacter::trivial(1).eval(0) == C64::new(1.0, 0.0));
    }
}
