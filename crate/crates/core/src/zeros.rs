//! Critical-line zeros of Λ_f: sign-change scanning with bisection,
//! winding-number certification, rectangle counts and residues of Δ_f.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::lfunction::{d_value, gamma_factor, l_derivatives, lambda_complete, EvalSettings};
use crate::newform::Newform;
use crate::{Error, Result, C64};

/// A zero ρ = k/2 + it of Λ_f.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroRecord {
    pub t: f64,
    pub refinement_error: f64,
    pub winding: i64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub lprime: C64,
    #[serde(serialize_with = "crate::ser_c64")]
    pub delta_residue: C64,
}

impl ZeroRecord {
    pub fn rho(&self, weight: u32) -> C64 {
        C64::new(weight as f64 / 2.0, self.t)
    }

    /// The record of the conjugate zero k/2 − it of a self-dual form.
    pub fn conjugate(&self) -> Self {
        Self {
            t: -self.t,
            lprime: self.lprime.conj(),
            delta_residue: self.delta_residue.conj(),
            ..*self
        }
    }
}

/// Number of zeros of Λ_f in [k/2−2, k/2+2] × [0, T].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxCount {
    #[serde(rename = "T")]
    pub t: f64,
    pub count: u64,
}

/// Output of [`scan_zeros`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanResult {
    pub zeros: Vec<ZeroRecord>,
    pub warnings: Vec<String>,
}

/// Bisection stops once the bracket is narrower than this.
const BISECTION_WIDTH: f64 = 1e-11;
pub const CERTIFY_RADIUS: f64 = 0.25;
const CERTIFY_NODES: usize = 256;

/// Z(t) = Re ε^{−1/2} N^{it/2} Λ_f(k/2 + it), which carries the whole value
/// when f is self-dual.
pub fn hardy_z(f: &Newform, t: f64, settings: &EvalSettings) -> Result<f64> {
    let k = f.weight() as f64;
    let rot = f.root_number().sqrt().inv() * C64::from_polar(1.0, 0.5 * t * (f.level() as f64).ln());
    Ok((rot * lambda_complete(f, C64::new(k / 2.0, t), settings)?).re)
}

fn sample<F>(g: &F, a: f64, b: f64, step: f64) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let t = if i == n { b } else { a + i as f64 * step };
            g(t).map(|v| (t, v))
        })
        .collect()
}

fn sign_brackets(samples: &[(f64, f64)]) -> Vec<(f64, f64, f64, f64)> {
    samples
        .windows(2)
        .filter(|w| w[0].1 == 0.0 || w[0].1.signum() != w[1].1.signum())
        .map(|w| (w[0].0, w[0].1, w[1].0, w[1].1))
        .collect()
}

fn bisect<F: Fn(f64) -> Result<f64>>(g: &F, bracket: (f64, f64, f64, f64)) -> Result<(f64, f64)> {
    let (mut a, mut fa, mut b, _) = bracket;
    if fa == 0.0 {
        return Ok((a, 0.0));
    }
    while b - a > BISECTION_WIDTH {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = g(m)?;
        if fm == 0.0 {
            return Ok((m, 0.0));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b), 0.5 * (b - a)))
}

/// Zeros k/2 + it with t ∈ [t_min, t_max].
///
/// Self-dual forms use sign changes of [`hardy_z`]; other forms use local
/// minima of |Λ_f| confirmed by winding number and refined by golden-section
/// search. Sign changes closer than 2·step trigger a rescan at step/4.
pub fn scan_zeros(f: &Newform, t_min: f64, t_max: f64, step: f64, settings: &EvalSettings) -> Result<ScanResult> {
    let mut out = ScanResult::default();
    if t_min > t_max {
        return Ok(out);
    }
    if !(step > 0.0) {
        return Err(Error::Precondition(format!("scan step must be positive, got {step}")));
    }
    let located: Vec<(f64, f64)> = if f.is_self_dual() {
        scan_sign_changes(f, t_min, t_max, step, settings, &mut out.warnings)?
    } else {
        scan_minima(f, t_min, t_max, step, settings)?
    };
    for (t, err) in located {
        out.zeros.push(make_record(f, t, err, settings)?);
    }
    Ok(out)
}

fn scan_sign_changes(
    f: &Newform,
    t_min: f64,
    t_max: f64,
    step: f64,
    settings: &EvalSettings,
    warnings: &mut Vec<String>,
) -> Result<Vec<(f64, f64)>> {
    let z = |t: f64| hardy_z(f, t, settings);
    let samples = sample(&z, t_min, t_max, step)?;
    let mut brackets = sign_brackets(&samples);
    let crowded = brackets.windows(2).any(|w| w[1].0 - w[0].2 < 2.0 * step);
    if crowded {
        warnings.push(format!(
            "sign changes closer than {:.3}; rescanned at step {:.4}",
            2.0 * step,
            step / 4.0
        ));
        brackets = sign_brackets(&sample(&z, t_min, t_max, step / 4.0)?);
    }
    brackets.into_par_iter().map(|b| bisect(&z, b)).collect()
}

fn scan_minima(f: &Newform, t_min: f64, t_max: f64, step: f64, settings: &EvalSettings) -> Result<Vec<(f64, f64)>> {
    let k = f.weight() as f64;
    let abs = |t: f64| lambda_complete(f, C64::new(k / 2.0, t), settings).map(|v| v.norm());
    let samples = sample(&abs, t_min, t_max, step)?;
    let mut found = Vec::new();
    for w in samples.windows(3) {
        if w[1].1 <= w[0].1 && w[1].1 < w[2].1 {
            let (t, err) = golden_min(&abs, w[0].0, w[2].0)?;
            let rho = C64::new(k / 2.0, t);
            if certify_simple(f, rho, CERTIFY_RADIUS.min(step), settings).unwrap_or(0) >= 1 {
                found.push((t, err));
            }
        }
    }
    Ok(found)
}

fn golden_min<F: Fn(f64) -> Result<f64>>(g: &F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (g(c)?, g(d)?);
    while b - a > BISECTION_WIDTH {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d)?;
        }
        if d - c <= 0.0 {
            break;
        }
    }
    Ok((0.5 * (a + b), 0.5 * (b - a)))
}

fn make_record(f: &Newform, t: f64, refinement_error: f64, settings: &EvalSettings) -> Result<ZeroRecord> {
    let rho = C64::new(f.weight() as f64 / 2.0, t);
    let winding = certify_simple(f, rho, CERTIFY_RADIUS, settings)?;
    let d = l_derivatives(f, rho, settings)?;
    Ok(ZeroRecord {
        t,
        refinement_error,
        winding,
        lprime: d.l1,
        delta_residue: gamma_factor(rho)? * (-d.l1),
    })
}

/// Spectral derivative of periodic samples v_j = g(θ_j), θ_j = 2πj/n.
fn spectral_derivative(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    let w = |j: usize| C64::from_polar(1.0, -TAU * j as f64 / n as f64);
    let roots: Vec<C64> = (0..n).map(w).collect();
    let coeffs: Vec<C64> = (0..n)
        .map(|m| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * roots[(j * m) % n])
                .sum::<C64>()
                / n as f64
        })
        .collect();
    let freq = |m: usize| {
        if 2 * m < n {
            m as f64
        } else if 2 * m > n {
            m as f64 - n as f64
        } else {
            0.0
        }
    };
    (0..n)
        .map(|j| {
            coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c * C64::new(0.0, freq(m)) * roots[(j * m) % n].conj())
                .sum()
        })
        .collect()
}

/// Winding number of g around the circle |s − center| = radius:
/// (1/2πi)∮ g′/g ds by the trapezoid rule on the spectral θ-derivative.
pub fn winding_number<G>(g: G, center: C64, radius: f64, nodes: usize) -> Result<i64>
where
    G: Fn(C64) -> Result<C64> + Sync,
{
    let nodes = nodes.max(256);
    let values: Vec<C64> = (0..nodes)
        .into_par_iter()
        .map(|j| g(center + C64::from_polar(radius, TAU * j as f64 / nodes as f64)))
        .collect::<Result<_>>()?;
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (jmin, min) = values
        .iter()
        .map(|v| v.norm())
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, v)| if v < acc.1 { (j, v) } else { acc });
    if !(min > 1e-12 * max) {
        let s = center + C64::from_polar(radius, TAU * jmin as f64 / nodes as f64);
        return Err(Error::ZeroOnContour { re: s.re, im: s.im });
    }
    let deriv = spectral_derivative(&values);
    let w: C64 = deriv.iter().zip(&values).map(|(d, v)| d / v).sum::<C64>() / C64::new(0.0, nodes as f64);
    let rounded = w.re.round();
    if (w - rounded).norm() >= 0.1 {
        return Err(Error::NonIntegerWinding(w.re));
    }
    Ok(rounded as i64)
}

/// Winding number of Λ_f around the circle |s − ρ| = radius.
pub fn certify_simple(f: &Newform, rho: C64, radius: f64, settings: &EvalSettings) -> Result<i64> {
    winding_number(|s| lambda_complete(f, s, settings), rho, radius, CERTIFY_NODES)
}

/// Argument-principle count on the rectangle [k/2−2, k/2+2] × [0, T] by
/// adaptive phase tracking; T is nudged by +0.01 (at most 5 times) when a
/// zero sits on the contour.
pub fn count_zeros(f: &Newform, t: f64, settings: &EvalSettings) -> Result<BoxCount> {
    if t <= 0.0 {
        return Ok(BoxCount { t, count: 0 });
    }
    let mut top = t;
    let mut last_err = None;
    for _ in 0..=5 {
        match rectangle_winding(f, top, settings) {
            Ok(w) => {
                return Ok(BoxCount {
                    t,
                    count: w.max(0) as u64,
                })
            }
            Err(e @ Error::ZeroOnContour { .. }) => {
                last_err = Some(e);
                top += 0.01;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran"))
}

fn rectangle_winding(f: &Newform, t: f64, settings: &EvalSettings) -> Result<i64> {
    let c = f.weight() as f64 / 2.0;
    let corners = [
        C64::new(c - 2.0, 0.0),
        C64::new(c + 2.0, 0.0),
        C64::new(c + 2.0, t),
        C64::new(c - 2.0, t),
    ];
    let g = |s: C64| lambda_complete(f, s, settings);
    let mut total = 0.0;
    for i in 0..4 {
        total += track_phase(&g, corners[i], corners[(i + 1) % 4])?;
    }
    let w = total / TAU;
    let rounded = w.round();
    if (w - rounded).abs() > 0.1 {
        return Err(Error::NonIntegerWinding(w));
    }
    Ok(rounded as i64)
}

/// Continuous change of arg g along the segment [a, b].
fn track_phase<G: Fn(C64) -> Result<C64> + Sync>(g: &G, a: C64, b: C64) -> Result<f64> {
    let len = (b - a).norm();
    let n = (len / 0.1).ceil().max(1.0) as usize;
    let pts: Vec<(C64, C64)> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let s = a + (b - a) * (i as f64 / n as f64);
            g(s).map(|v| (s, v))
        })
        .collect::<Result<_>>()?;
    let scale = pts.iter().map(|p| p.1.norm()).fold(0.0, f64::max);
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += phase_between(g, w[0], w[1], scale, 0)?;
    }
    Ok(total)
}

fn phase_between<G: Fn(C64) -> Result<C64>>(
    g: &G,
    (sa, va): (C64, C64),
    (sb, vb): (C64, C64),
    scale: f64,
    depth: u32,
) -> Result<f64> {
    for (s, v) in [(sa, va), (sb, vb)] {
        if v.norm() < 1e-13 * scale {
            return Err(Error::ZeroOnContour { re: s.re, im: s.im });
        }
    }
    let d = (vb / va).arg();
    if d.abs() < PI / 8.0 {
        return Ok(d);
    }
    if depth > 40 {
        return Err(Error::ZeroOnContour { re: sa.re, im: sa.im });
    }
    let sm = 0.5 * (sa + sb);
    let vm = g(sm)?;
    Ok(phase_between(g, (sa, va), (sm, vm), scale, depth + 1)?
        + phase_between(g, (sm, vm), (sb, vb), scale, depth + 1)?)
}

/// Zeros with |t| ≤ T and their Δ_f residues. Self-dual forms are scanned on
/// [0, T] and mirrored; other forms are scanned on [−T, T]. Every zero must be
/// certified simple.
pub fn residues_up_to(f: &Newform, t: f64, step: f64, settings: &EvalSettings) -> Result<Vec<ZeroRecord>> {
    let mut zeros = if f.is_self_dual() {
        let scan = scan_zeros(f, 0.0, t, step, settings)?;
        let mut z: Vec<ZeroRecord> = scan.zeros.iter().filter(|r| r.t > 0.0).map(|r| r.conjugate()).collect();
        z.extend(scan.zeros);
        z
    } else {
        scan_zeros(f, -t, t, step, settings)?.zeros
    };
    zeros.sort_by(|a, b| a.t.total_cmp(&b.t));
    if let Some(bad) = zeros.iter().find(|z| z.winding != 1) {
        return Err(Error::Invariant(format!(
            "zero at t = {} has winding {}; residue formula needs a simple zero",
            bad.t, bad.winding
        )));
    }
    Ok(zeros)
}

/// max over the four directions u ∈ {1, i, −1, −i} of
/// |Richardson[(s−ρ)D_f(s)] + L′(ρ)| / |L′(ρ)| with s = ρ + h·u.
pub fn laurent_check(f: &Newform, zero: &ZeroRecord, h: f64, settings: &EvalSettings) -> Result<f64> {
    let rho = zero.rho(f.weight());
    let g = |step: f64, u: C64| -> Result<C64> {
        let s = rho + step * u;
        Ok((s - rho) * d_value(f, s, settings)?)
    };
    let mut worst: f64 = 0.0;
    for u in [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)] {
        let estimate = 2.0 * g(h / 2.0, u)? - g(h, u)?;
        worst = worst.max((estimate + zero.lprime).norm() / zero.lprime.norm());
    }
    Ok(worst)
}

/// Compares the rectangle count with the critical-line scan; a mismatch means
/// zeros off the critical line (or missed by the scan) and is reported, not
/// raised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrhReport {
    pub box_count: u64,
    pub critical_line_count: u64,
    pub consistent: bool,
}

pub fn grh_report(f: &Newform, t: f64, step: f64, settings: &EvalSettings) -> Result<GrhReport> {
    let box_count = count_zeros(f, t, settings)?.count;
    let line = scan_zeros(f, 0.0, t, step, settings)?.zeros.len() as u64;
    Ok(GrhReport {
        box_count,
        critical_line_count: line,
        consistent: box_count == line,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_of_polynomials() {
        let g = |s: C64| Ok((s - 0.1) * (s + C64::new(0.0, 0.2)) * (s - 3.0));
        assert_eq!(winding_number(g, C64::new(0.0, 0.0), 0.5, 256).unwrap(), 2);
        assert_eq!(winding_number(g, C64::new(3.0, 0.0), 0.5, 256).unwrap(), 1);
        assert_eq!(winding_number(g, C64::new(1.5, 0.0), 0.5, 256).unwrap(), 0);
        assert!(matches!(
            winding_number(g, C64::new(3.5, 0.0), 0.5, 256),
            Err(Error::ZeroOnContour { .. })
        ));
    }

    #[test]
    fn spectral_derivative_of_trig() {
        let n = 64;
        let vals: Vec<C64> = (0..n).map(|j| C64::new((TAU * j as f64 / n as f64 * 3.0).sin(), 0.0)).collect();
        let d = spectral_derivative(&vals);
        for (j, v) in d.iter().enumerate() {
            let expect = 3.0 * (TAU * j as f64 / n as f64 * 3.0).cos();
            assert!((v.re - expect).abs() < 1e-11 && v.im.abs() < 1e-11);
        }
    }

    #[test]
    fn bisection_and_golden_section() {
        let g = |t: f64| Ok(t * t - 2.0);
        let (r, e) = bisect(&g, (1.0, -1.0, 2.0, 2.0)).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-10 && e < 1e-9);
        let (m, _) = golden_min(&|t: f64| Ok((t - 0.3).abs()), 0.0, 1.0).unwrap();
        assert!((m - 0.3).abs() < 1e-9);
    }

    /// The literal count of three ordinates in [0, 20] for Δ; the fourth
    /// lies at 19.6565.
    #[test]
    #[ignore]
    fn delta_count_to_twenty_literal() {
        let f = crate::newform::delta_coefficients(2000).unwrap();
        assert_eq!(count_zeros(&f, 20.0, &EvalSettings::default()).unwrap().count, 3);
    }
}
