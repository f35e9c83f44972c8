//! Numerical laboratory for the L-functions of holomorphic newforms.
//!
//! The crate evaluates completed L-functions Λ_f, the series
//! D_f = L_f·(log L_f)'' and its additive and multiplicative twists, locates
//! and certifies critical-line zeros, analyses local Euler factors, and checks
//! the contour and Mellin identities that relate D_f(s, α) to D_f̄(s, −1/(Nα)).

pub mod character;
pub mod dirichlet;
pub mod error;
pub mod euler_local;
pub mod lfunction;
pub mod newform;
pub mod poly;
pub mod primes;
pub mod quad;
pub mod report;
pub mod special;
pub mod twists;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex number type used for every point s, z, ρ and every coefficient.
pub type C64 = Complex64;

/// `e(x) = exp(2πix)`.
#[inline]
pub fn e(x: f64) -> C64 {
    let t = std::f64::consts::TAU * x;
    C64::new(t.cos(), t.sin())
}

pub(crate) fn ensure_finite(z: C64, what: &'static str) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Neumaier-compensated complex summation with a fixed, caller-given order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: C64) {
        self.sum.re = neumaier_step(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier_step(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

#[inline]
fn neumaier_step(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

impl FromIterator<C64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}


/// Serializes a complex number as `[re, im]`.
pub fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}
