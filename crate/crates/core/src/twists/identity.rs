//! F(z) = Σ c_f(n)e(nz), A(z), B_T(z) and the truncated identity
//! F(z) + A(z) = ε(−i√N z)^{−k}F̄(−1/(Nz)) + B_T(z) + (residues above T).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use super::bounds::CoeffBound;
use super::point::UpperHalfPoint;
use super::TwistValue;
use crate::dirichlet::d_coefficients;
use crate::lfunction::{lambda_complete, EvalSettings};
use crate::newform::Newform;
use crate::quad::{integrate_to_infinity, QuadOptions};
use crate::special::gamma;
use crate::zeros::{residues_up_to, ZeroRecord};
use crate::{e, CompensatedSum, Error, Result, C64};

/// Truncated q-series Σ coeff(n)e(nw) with a coefficient majorant.
#[derive(Debug, Clone)]
pub struct QSeries {
    coeffs: Vec<C64>,
    bound: CoeffBound,
}

impl QSeries {
    /// The coefficients c_f(n) of D_f, n ≤ n_max.
    pub fn d_series(f: &Newform, n_max: usize) -> Result<Self> {
        if n_max > f.n_max() {
            return Err(Error::InsufficientCoefficients {
                needed: n_max,
                available: f.n_max(),
            });
        }
        Ok(Self {
            coeffs: d_coefficients(f, n_max)?.coeffs().to_vec(),
            bound: CoeffBound::d_coeffs(f, 0.25)?,
        })
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    /// Σ_{n ≤ N} coeff(n)e(nw) with N the smallest cutoff whose tail bound is
    /// at most `tol`.
    pub fn eval(&self, w: C64, tol: f64) -> Result<TwistValue> {
        if w.im <= 0.0 {
            return Err(Error::Precondition(format!("q-series needs Im w > 0, got {w}")));
        }
        let (n_cut, tail_bound) = self.bound.exponential_cutoff(TAU * w.im, |_| 1.0, tol)?;
        if n_cut > self.coeffs.len() {
            return Err(Error::InsufficientCoefficients {
                needed: n_cut,
                available: self.coeffs.len(),
            });
        }
        let value = self.coeffs[..n_cut]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (C64::new(0.0, TAU * (i + 1) as f64) * w).exp())
            .collect::<CompensatedSum>()
            .value();
        Ok(TwistValue {
            value,
            tail_bound,
            n_cut,
        })
    }
}

/// F(z) = Σ c_f(n)e(nz) using at most `n_cut` terms.
pub fn f_value(f: &Newform, z: &UpperHalfPoint, n_cut: usize, tol: f64) -> Result<TwistValue> {
    QSeries::d_series(f, n_cut.min(f.n_max()))?.eval(z.z(), tol)
}

/// φ(x) = (x^{k−1} + 1)·log x/(x − 1) for Re x ≥ 1.
fn phi0(k: u32, x: C64) -> C64 {
    let t = x - 1.0;
    let ratio = if t.norm() < 1e-3 {
        1.0 - t / 2.0 + t * t / 3.0 - t * t * t / 4.0 + t * t * t * t / 5.0
    } else {
        x.ln() / t
    };
    (x.powi(k as i32 - 1) + 1.0) * ratio
}

/// ∫₁^∞φ(x)e(nxz)dx along x = 1 + τd with d = i z̄/|z|, where the integrand
/// is e(nz)·φ(x)·e^{−2πn|z|τ}: no oscillation and Re x ≥ 1 throughout.
fn a_integral(k: u32, z: C64, n: u64, quad_tol: f64) -> Result<C64> {
    let d = C64::new(0.0, 1.0) * z.conj() / z.norm();
    let lambda = TAU * n as f64 * z.norm();
    let r = integrate_to_infinity(
        |tau| phi0(k, 1.0 + d * tau) * (-lambda * tau).exp(),
        0.0,
        2.0 / lambda,
        QuadOptions {
            abs_tol: quad_tol * 1e-3,
            rel_tol: quad_tol.max(1e-13),
            max_intervals: 4000,
        },
    )?;
    Ok(e(n as f64 * z.re) * (-TAU * n as f64 * z.im).exp() * d * r.value)
}

/// e^λΓ(k, λ)/λ^k + 1/λ = ∫₀^∞((1+τ)^{k−1} + 1)e^{−λτ}dτ, which dominates
/// |∫φ(1+τd)e^{−λτ}dτ| since |log x/(x−1)| ≤ 1 for Re x ≥ 1.
fn a_integral_bound(k: u32, lambda: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for i in 0..k {
        sum += term;
        term *= lambda / (i + 1) as f64;
    }
    let fact: f64 = (1..k).map(|i| i as f64).product();
    fact * sum / lambda.powi(k as i32) + 1.0 / lambda
}

/// A(z) = Σ a(n)∫₁^∞φ(x)e(nxz)dx, with the n-cutoff chosen from
/// |a(n)| ≤ d(n)n^{(k−1)/2} and [`a_integral_bound`].
pub fn a_value(f: &Newform, z: C64, quad_tol: f64) -> Result<TwistValue> {
    if z.im <= 0.0 {
        return Err(Error::Precondition(format!("A needs Im z > 0, got {z}")));
    }
    let k = f.weight();
    let bound = CoeffBound::l_coeffs(f, 0.25)?;
    let zn = z.norm();
    let (n_cut, tail_bound) =
        bound.exponential_cutoff(TAU * z.im, |n| a_integral_bound(k, TAU * n * zn), quad_tol)?;
    if n_cut > f.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: n_cut,
            available: f.n_max(),
        });
    }
    let terms: Vec<C64> = (1..=n_cut as u64)
        .into_par_iter()
        .map(|n| Ok(f.a(n as usize) * a_integral(k, z, n, quad_tol)?))
        .collect::<Result<_>>()?;
    Ok(TwistValue {
        value: terms.into_iter().collect::<CompensatedSum>().value(),
        tail_bound,
        n_cut,
    })
}

/// Samples of (1/2π)·π²/sin²(πs)·Λ_f(s) on s = k − 1/2 + it, t = jh, for the
/// trapezoid rule. The integrand is analytic in |Im t| < 1/2, so the rule
/// converges like e^{−π/h}; nodes stop once the rigorous magnitude bound falls
/// below the tolerance for every weight |w(s)| ≤ e^{(π/2)|t|}(1+|s|)^degree.
#[derive(Debug, Clone)]
pub struct LineSamples {
    pub step: f64,
    pub t_max: f64,
    nodes: Vec<(C64, C64)>,
}

pub(crate) fn line_abscissa(f: &Newform) -> f64 {
    f.weight() as f64 - 0.5
}

impl LineSamples {
    pub fn new(f: &Newform, degree: u32, tol: f64, settings: &EvalSettings) -> Result<Self> {
        let c = line_abscissa(f);
        let bound = CoeffBound::l_coeffs(f, 0.25)?;
        let dirichlet = bound.at(1.0) + bound.dirichlet_tail(1, c);
        let lambda_bound = (-c * TAU.ln()).exp() * gamma(C64::new(c, 0.0))?.re * dirichlet;
        // |π²/sin²(π(c+it))| = π²/cosh²(πt) ≤ 4π²e^{−2π|t|}
        let envelope = |t: f64| {
            4.0 * PI * PI * (-2.0 * PI * t).exp() * lambda_bound * (FRAC_PI_2 * t).exp()
                * (1.0 + c + t).powi(degree as i32)
                / TAU
        };
        let mut t_max = 1.0;
        while envelope(t_max) > tol * 1e-3 {
            t_max += 0.5;
            if t_max > 200.0 {
                return Err(Error::Precondition("line integral does not settle".into()));
            }
        }
        let step = 1.0 / 32.0;
        let count = (t_max / step).ceil() as i64;
        let nodes = (-count..=count)
            .into_par_iter()
            .map(|j| {
                let s = C64::new(c, j as f64 * step);
                let sin = (PI * s).sin();
                let v = PI * PI / (sin * sin) * lambda_complete(f, s, settings)? / TAU;
                Ok((s, v))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { step, t_max, nodes })
    }

    /// (1/2πi)∫ w(s)·π²/sin²(πs)·Λ_f(s)ds over the line.
    pub fn integrate<W: Fn(C64) -> C64>(&self, w: W) -> C64 {
        self.nodes
            .iter()
            .map(|&(s, v)| w(s) * v * self.step)
            .collect::<CompensatedSum>()
            .value()
    }

    /// |(1/2π)·π²/sin²(πs)·Λ_f(s)(−iz)^{−s}| at the node nearest t, if sampled.
    pub fn integrand_magnitude(&self, z: C64, t: f64) -> Option<f64> {
        if t.abs() > self.t_max {
            return None;
        }
        let log_w = (-C64::new(0.0, 1.0) * z).ln();
        let j = ((t + self.t_max) / self.step).round() as usize;
        let (s, v) = *self.nodes.get(j)?;
        Some((v * (-s * log_w).exp()).norm())
    }
}

/// Certified simple zeros with |Im ρ| ≤ T and their Δ_f residues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueSet {
    /// The height actually used, after moving off zero ordinates.
    #[serde(rename = "T")]
    pub t: f64,
    pub requested: f64,
    pub weight: u32,
    pub zeros: Vec<ZeroRecord>,
    /// Zeros found above T (up to the scanned height), nearest first.
    pub omitted: Vec<ZeroRecord>,
}

/// Ordinates closer than this to T move T up by 0.01.
const ORDINATE_GAP: f64 = 1e-3;

impl ResidueSet {
    /// Scans to T + `margin` and keeps the zeros with |Im ρ| ≤ T.
    pub fn compute(f: &Newform, t: f64, margin: f64, settings: &EvalSettings) -> Result<Self> {
        let all = residues_up_to(f, t + margin.max(0.05), 0.1, settings)?;
        let mut height = t;
        for _ in 0..6 {
            if all.iter().all(|z| (z.t.abs() - height).abs() >= ORDINATE_GAP) {
                let (zeros, mut omitted): (Vec<ZeroRecord>, Vec<ZeroRecord>) =
                    all.iter().partition(|z| z.t.abs() <= height);
                omitted.sort_by(|a, b| a.t.abs().total_cmp(&b.t.abs()));
                return Ok(Self {
                    t: height,
                    requested: t,
                    weight: f.weight(),
                    zeros,
                    omitted,
                });
            }
            height += 0.01;
        }
        Err(Error::ZeroOnContour {
            re: f.weight() as f64 / 2.0,
            im: t,
        })
    }

    /// The same zeros split at a lower height t, moved off ordinates as in
    /// [`ResidueSet::compute`].
    pub fn restrict(&self, t: f64) -> Result<Self> {
        if t > self.t {
            return Err(Error::Precondition(format!("cannot raise T from {} to {t}", self.t)));
        }
        let mut height = t;
        for _ in 0..6 {
            let all = self.zeros.iter().chain(&self.omitted);
            if all.clone().all(|z| (z.t.abs() - height).abs() >= ORDINATE_GAP) {
                let (zeros, mut omitted): (Vec<ZeroRecord>, Vec<ZeroRecord>) =
                    all.cloned().partition(|z| z.t.abs() <= height);
                omitted.sort_by(|a, b| a.t.abs().total_cmp(&b.t.abs()));
                return Ok(Self {
                    t: height,
                    requested: t,
                    weight: self.weight,
                    zeros,
                    omitted,
                });
            }
            height += 0.01;
        }
        Err(Error::ZeroOnContour {
            re: self.weight as f64 / 2.0,
            im: t,
        })
    }

    /// Σ_ρ Res_{s=ρ}Δ_f(s)·w(ρ).
    pub fn sum<W: Fn(C64) -> C64>(&self, w: W) -> C64 {
        self.zeros
            .iter()
            .map(|z| z.delta_residue * w(z.rho(self.weight)))
            .collect::<CompensatedSum>()
            .value()
    }

    /// |Σ over the first omitted ordinate (and its conjugate) of res·(−iz)^{−ρ}|.
    pub fn first_omitted_magnitude(&self, z: C64) -> Option<f64> {
        let first = self.omitted.first()?.t.abs();
        let log_w = (-C64::new(0.0, 1.0) * z).ln();
        Some(
            self.omitted
                .iter()
                .filter(|r| (r.t.abs() - first).abs() < 1e-9)
                .map(|r| r.delta_residue * (-r.rho(self.weight) * log_w).exp())
                .sum::<C64>()
                .norm(),
        )
    }
}

/// B_T(z) = Σ_{|Im ρ| ≤ T} res_ρ·(−iz)^{−ρ} + (1/2πi)∫ π²/sin²(πs)Λ_f(s)(−iz)^{−s}ds.
pub fn b_value(z: C64, residues: &ResidueSet, line: &LineSamples) -> C64 {
    let log_w = (-C64::new(0.0, 1.0) * z).ln();
    let w = |s: C64| (-s * log_w).exp();
    residues.sum(w) + line.integrate(w)
}

/// ε(−i√N z)^{−k}F̄(−1/(Nz)).
pub fn fbar_transformed(f: &Newform, fbar: &QSeries, z: C64, tol: f64) -> Result<C64> {
    let n = f.level() as f64;
    let w = -1.0 / (n * z);
    let prefactor = f.root_number() * (C64::new(0.0, -n.sqrt()) * z).powi(-(f.weight() as i32));
    Ok(prefactor * fbar.eval(w, tol / prefactor.norm().max(1.0))?.value)
}

/// All terms of the truncated identity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityTerms {
    #[serde(serialize_with = "crate::ser_c64")]
    pub f: C64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub a: C64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub fbar: C64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub b: C64,
    pub residual: f64,
}

/// Shared data for repeated evaluations of the identity for one form.
#[derive(Debug, Clone)]
pub struct IdentityContext<'a> {
    pub f: &'a Newform,
    pub series: QSeries,
    pub dual_series: QSeries,
    pub line: LineSamples,
    pub tol: f64,
}

impl<'a> IdentityContext<'a> {
    pub fn new(f: &'a Newform, n_max: usize, line_degree: u32, tol: f64, settings: &EvalSettings) -> Result<Self> {
        let n_max = n_max.min(f.n_max());
        Ok(Self {
            f,
            series: QSeries::d_series(f, n_max)?,
            dual_series: QSeries::d_series(&f.dual(), n_max)?,
            line: LineSamples::new(f, line_degree, tol, settings)?,
            tol,
        })
    }

    pub fn terms(&self, z: C64, residues: &ResidueSet) -> Result<IdentityTerms> {
        let fv = self.series.eval(z, self.tol)?.value;
        let av = a_value(self.f, z, self.tol)?.value;
        let fbar = fbar_transformed(self.f, &self.dual_series, z, self.tol)?;
        let b = b_value(z, residues, &self.line);
        Ok(IdentityTerms {
            f: fv,
            a: av,
            fbar,
            b,
            residual: (fv + av - fbar - b).norm(),
        })
    }
}

/// |F(z) + A(z) − ε(−i√N z)^{−k}F̄(−1/(Nz)) − B_T(z)|.
pub fn main_identity_residual(
    f: &Newform,
    z: &UpperHalfPoint,
    residues: &ResidueSet,
    tol: f64,
    settings: &EvalSettings,
) -> Result<f64> {
    let ctx = IdentityContext::new(f, f.n_max(), 0, tol, settings)?;
    Ok(ctx.terms(z.z(), residues)?.residual)
}
