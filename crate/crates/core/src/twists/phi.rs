//! The functions φ₀(x, s) = (x^{k−1}+1)log x/(x−1) and
//! φ_{j+1} = x∂_xφ_j − (s+j)φ_j, exactly as series in t = x − 1 and
//! numerically anywhere in Re x > 0, and the integration-by-parts expansion
//! of ∫₁^∞φ(x)e(αnx)x^{−s}dx they produce.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::poly::{rat, RatPoly};
use crate::quad::{integrate_to_infinity, QuadOptions};
use crate::special::trigamma;
use crate::{e, Error, Result, C64};

/// φ_j(1 + t, s) = Σ_{r ≤ J−j} coeffs[r](s)·t^r + O(t^{J−j+1}).
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSeries {
    pub j: usize,
    pub coeffs: Vec<RatPoly>,
}

impl PhiSeries {
    /// φ_j(1, s).
    pub fn at_one(&self) -> &RatPoly {
        &self.coeffs[0]
    }

    /// The largest degree in s over all t-coefficients.
    pub fn s_degree(&self) -> usize {
        self.coeffs.iter().map(RatPoly::degree).max().unwrap_or(0)
    }
}

fn binom_int(n: u64, r: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Taylor coefficients of φ₀ at x = 1 up to t^J:
/// ((1+t)^{k−1} + 1)·Σ_r (−1)^r t^r/(r+1).
pub fn phi0_series(k: u32, big_j: usize) -> Vec<BigRational> {
    let log_ratio: Vec<BigRational> = (0..=big_j)
        .map(|r| rat(if r % 2 == 0 { 1 } else { -1 }, r as i64 + 1))
        .collect();
    let mut poly = vec![BigRational::zero(); big_j + 1];
    for (i, c) in poly.iter_mut().enumerate().take(k as usize) {
        *c = BigRational::from_integer(binom_int(k as u64 - 1, i as u64));
    }
    poly[0] += BigRational::from_integer(BigInt::from(1));
    (0..=big_j)
        .map(|r| (0..=r).fold(BigRational::zero(), |acc, i| acc + &poly[i] * &log_ratio[r - i]))
        .collect()
}

/// φ₀, …, φ_{j_max} as exact series truncated at t^J. Each application of
/// x∂_x = (1+t)d/dt consumes one coefficient, so φ_j is known to t^{J−j}.
pub fn phi_recursion(k: u32, j_max: usize, big_j: usize) -> Result<Vec<PhiSeries>> {
    if j_max > 12 || big_j < j_max + 4 {
        return Err(Error::Precondition(format!(
            "phi recursion needs j_max ≤ 12 and J ≥ j_max + 4 (got j_max = {j_max}, J = {big_j})"
        )));
    }
    Ok(phi_series_unchecked(k, j_max, big_j))
}

fn phi_series_unchecked(k: u32, j_max: usize, big_j: usize) -> Vec<PhiSeries> {
    let mut out = vec![PhiSeries {
        j: 0,
        coeffs: phi0_series(k, big_j).into_iter().map(RatPoly::constant).collect(),
    }];
    for j in 0..j_max {
        let prev = &out[j].coeffs;
        let shift = RatPoly::linear(rat(j as i64, 1), rat(1, 1));
        let next: Vec<RatPoly> = (0..prev.len() - 1)
            .map(|r| {
                let d = prev[r + 1].scale(&rat(r as i64 + 1, 1));
                let x = prev[r].scale(&rat(r as i64, 1));
                &(&d + &x) - &(&shift * &prev[r])
            })
            .collect();
        out.push(PhiSeries { j: j + 1, coeffs: next });
    }
    out
}

/// Truncated Taylor series in h with complex coefficients.
#[derive(Debug, Clone)]
struct Jet(Vec<C64>);

impl Jet {
    fn mul(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        Jet((0..n)
            .map(|m| (0..=m).map(|i| self.0[i] * o.0[m - i]).sum())
            .collect())
    }

    fn div(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        let mut q = vec![C64::new(0.0, 0.0); n];
        for m in 0..n {
            let acc: C64 = (0..m).map(|i| q[i] * o.0[m - i]).sum();
            q[m] = (self.0[m] - acc) / o.0[0];
        }
        Jet(q)
    }

    /// exp(c·(u₀ + h)) as a jet in h.
    fn exp_linear(c: f64, u0: C64, n: usize) -> Jet {
        let base = (c * u0).exp();
        let mut term = base;
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(term);
            term = term * c / (i as f64 + 1.0);
        }
        Jet(v)
    }
}

/// Numerical φ_j(x, s) for j ≤ j_max and Re x > 0.
#[derive(Debug, Clone)]
pub struct PhiEvaluator {
    k: u32,
    j_max: usize,
    /// series[j][r] = t^r coefficient of φ_j as a polynomial in s.
    series: Vec<Vec<Vec<f64>>>,
}

/// |x − 1| up to which the t-series is used.
const SERIES_RADIUS: f64 = 0.25;
/// Series terms kept beyond the recursion depth; 0.25^48 ≈ 1e−29.
const SERIES_EXTRA: usize = 48;

impl PhiEvaluator {
    pub fn new(k: u32, j_max: usize) -> Self {
        let exact = phi_series_unchecked(k, j_max, j_max + SERIES_EXTRA);
        let series = exact
            .iter()
            .map(|p| p.coeffs.iter().map(RatPoly::to_f64).collect())
            .collect();
        Self { k, j_max, series }
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn eval(&self, j: usize, x: C64, s: C64) -> Result<C64> {
        if j > self.j_max {
            return Err(Error::Precondition(format!("phi_{j} beyond j_max = {}", self.j_max)));
        }
        if x.re <= 0.0 {
            return Err(Error::Precondition(format!("phi needs Re x > 0, got {x}")));
        }
        let t = x - 1.0;
        if t.norm() <= SERIES_RADIUS {
            let mut acc = C64::new(0.0, 0.0);
            for c in self.series[j].iter().rev() {
                let cs = c.iter().rev().fold(C64::new(0.0, 0.0), |a, &v| a * s + v);
                acc = acc * t + cs;
            }
            return Ok(acc);
        }
        Ok(self.eval_by_jets(j, x, s))
    }

    /// φ_j = Π_{i<j}(D − s − i)φ₀ with D = d/du, u = log x, applied to the
    /// Taylor jet of g(u) = (e^{(k−1)u} + 1)u/(e^u − 1).
    fn eval_by_jets(&self, j: usize, x: C64, s: C64) -> C64 {
        let n = j + 1;
        let u0 = x.ln();
        let mut num = Jet::exp_linear(self.k as f64 - 1.0, u0, n);
        num.0[0] += 1.0;
        let mut lin = vec![C64::new(0.0, 0.0); n];
        lin[0] = u0;
        if n > 1 {
            lin[1] = C64::new(1.0, 0.0);
        }
        let mut den = Jet::exp_linear(1.0, u0, n);
        den.0[0] -= 1.0;
        let g = num.mul(&Jet(lin)).div(&den);
        // coefficients of Π (D − s − i) as a polynomial in D
        let mut op = vec![C64::new(1.0, 0.0)];
        for i in 0..j {
            let c = s + i as f64;
            let mut next = vec![C64::new(0.0, 0.0); op.len() + 1];
            for (d, &v) in op.iter().enumerate() {
                next[d + 1] += v;
                next[d] -= c * v;
            }
            op = next;
        }
        let mut fact = 1.0;
        let mut acc = C64::new(0.0, 0.0);
        for (d, &v) in op.iter().enumerate() {
            if d > 0 {
                fact *= d as f64;
            }
            acc += v * g.0[d] * fact;
        }
        acc
    }
}

/// ∫₁^∞ φ_j(x, s)x^{−s−j}e(αnx)dx along the ray x = 1 + i·sgn(α)τ, on which
/// e(αnx) = e(αn)e^{−2π|α|nτ}. For Re s > k − j this is the integral along
/// [1, ∞); elsewhere it is its analytic continuation in s.
pub fn phi_oscillatory_integral(
    phi: &PhiEvaluator,
    j: usize,
    alpha: f64,
    n: u64,
    s: C64,
    quad_tol: f64,
) -> Result<C64> {
    if alpha == 0.0 || n == 0 {
        return Err(Error::Precondition("alpha and n must be nonzero".into()));
    }
    let sg = alpha.signum();
    let lambda = TAU * alpha.abs() * n as f64;
    let dir = C64::new(0.0, sg);
    let exponent = -s - j as f64;
    let mut failure = None;
    let r = integrate_to_infinity(
        |tau| {
            let x = 1.0 + dir * tau;
            match phi.eval(j, x, s) {
                Ok(v) => v * (exponent * x.ln()).exp() * (-lambda * tau).exp() * dir,
                Err(err) => {
                    failure.get_or_insert(err);
                    C64::new(0.0, 0.0)
                }
            }
        },
        0.0,
        2.0 / lambda,
        QuadOptions {
            abs_tol: quad_tol * 1e-3,
            rel_tol: quad_tol,
            max_intervals: 4000,
        },
    )?;
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(e(alpha * n as f64) * r.value)
}

/// |I₀ − [e(αn)Σ_{j<m}φ_j(1,s)(−2πiαn)^{−(j+1)} + (−2πiαn)^{−m}I_m]| with
/// I_j = ∫₁^∞φ_j(x,s)e(αnx)x^{−s−j}dx.
pub fn ibp_expansion_check(k: u32, alpha: f64, s: C64, m: usize, n: u64, quad_tol: f64) -> Result<f64> {
    if n > 50 || m > 6 {
        return Err(Error::Precondition(format!("ibp check needs n ≤ 50, m ≤ 6 (got n = {n}, m = {m})")));
    }
    let phi = PhiEvaluator::new(k, m);
    let lhs = phi_oscillatory_integral(&phi, 0, alpha, n, s, quad_tol)?;
    let w = C64::new(0.0, -TAU * alpha * n as f64);
    let mut rhs = C64::new(0.0, 0.0);
    let mut wp = w;
    for j in 0..m {
        rhs += e(alpha * n as f64) * phi.eval(j, C64::new(1.0, 0.0), s)? / wp;
        wp *= w;
    }
    let rem = phi_oscillatory_integral(&phi, m, alpha, n, s, quad_tol)?;
    rhs += rem / w.powi(m as i32);
    Ok((lhs - rhs).norm())
}

/// max |φ_j(x, s)|/((1+|s|)^j x^{k−1}) over the sample grid x ∈ [1, 3],
/// s ∈ {k/2 + it}.
pub fn phi_growth_constant(k: u32, j: usize) -> Result<f64> {
    let phi = PhiEvaluator::new(k, j);
    let mut worst: f64 = 0.0;
    for xi in 0..=40 {
        let x = 1.0 + 0.05 * xi as f64;
        for t in [-20.0, -5.0, 0.0, 3.0, 10.0, 30.0] {
            let s = C64::new(k as f64 / 2.0, t);
            let v = phi.eval(j, C64::new(x, 0.0), s)?;
            worst = worst.max(v.norm() / ((1.0 + s.norm()).powi(j as i32) * x.powi(k as i32 - 1)));
        }
    }
    Ok(worst)
}

/// ∫₁^∞φ(x)x^{−s}dx by quadrature in u = log x. The integrand grows like
/// x^{k−2−Re s}log x, so the integral exists only for Re s > k − 1.
pub fn phi_mellin(k: u32, s: C64, quad_tol: f64) -> Result<C64> {
    let edge = k as f64 - 1.0;
    if s.re <= edge {
        return Err(Error::Precondition(format!(
            "∫₁^∞φ(x)x^(−s)dx diverges for Re s = {} ≤ {edge}",
            s.re
        )));
    }
    let r = integrate_to_infinity(
        |u| {
            // u/(e^u − 1) → 1 as u → 0
            let ratio = if u < 1e-8 { 1.0 - u / 2.0 } else { u / u.exp_m1() };
            (((k as f64 - s) * u).exp() + ((1.0 - s) * u).exp()) * ratio
        },
        0.0,
        1.0 / (s.re - edge),
        QuadOptions {
            abs_tol: quad_tol * 1e-3,
            rel_tol: quad_tol,
            max_intervals: 4000,
        },
    )?;
    Ok(r.value)
}

/// ψ′(s) + ψ′(s + 1 − k), the closed form of [`phi_mellin`].
pub fn phi_mellin_closed(k: u32, s: C64) -> Result<C64> {
    Ok(trigamma(s)? + trigamma(s + 1.0 - k as f64)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_with_breaks, QuadOptions};

    #[test]
    fn low_order_values() {
        let p = phi_recursion(12, 3, 10).unwrap();
        assert_eq!(p[0].at_one(), &RatPoly::constant(rat(2, 1)));
        assert_eq!(p[1].at_one(), &RatPoly::linear(rat(10, 1), rat(-2, 1)));
        for (j, series) in p.iter().enumerate() {
            assert!(series.s_degree() <= j);
            assert_eq!(series.coeffs.len(), 11 - j);
        }
        assert!(phi_recursion(12, 8, 11).is_err());
        assert!(phi_recursion(12, 13, 40).is_err());
    }

    #[test]
    fn phi0_series_matches_closed_form() {
        let phi = PhiEvaluator::new(12, 0);
        for &x in &[0.8f64, 1.1, 1.24, 1.26, 2.0, 7.5] {
            let direct = (x.powi(11) + 1.0) * f64::ln(x) / (x - 1.0);
            let v = phi.eval(0, C64::new(x, 0.0), C64::new(3.0, 0.0)).unwrap();
            assert!((v.re - direct).abs() < 1e-13 * direct.abs() && v.im.abs() < 1e-12);
        }
        assert_eq!(phi.eval(0, C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap().re, 2.0);
    }

    #[test]
    fn series_and_jets_agree_across_the_switch() {
        let phi = PhiEvaluator::new(12, 6);
        let s = C64::new(9.0, 2.0);
        for j in 0..=6 {
            for &x in &[C64::new(1.2, 0.1), C64::new(1.0, 0.24), C64::new(0.85, -0.1)] {
                let a = phi.eval(j, x, s).unwrap();
                let b = phi.eval_by_jets(j, x, s);
                assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "j {j} x {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn recursion_by_finite_differences() {
        // x∂_xφ_j − (s+j)φ_j against φ_{j+1}, with the derivative by central differences
        let phi = PhiEvaluator::new(12, 4);
        let s = C64::new(4.0, 1.0);
        for &x in &[1.1, 1.7, 3.0] {
            for j in 0..4 {
                let h = 1e-4 * x;
                let d = (phi.eval(j, C64::new(x + h, 0.0), s).unwrap()
                    - phi.eval(j, C64::new(x - h, 0.0), s).unwrap())
                    / (2.0 * h);
                let lhs = x * d - (s + j as f64) * phi.eval(j, C64::new(x, 0.0), s).unwrap();
                let rhs = phi.eval(j + 1, C64::new(x, 0.0), s).unwrap();
                assert!((lhs - rhs).norm() < 1e-6 * rhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn rotated_ray_matches_real_axis() {
        // at s = 14 the integral along [1, ∞) converges absolutely
        let phi = PhiEvaluator::new(12, 0);
        let s = C64::new(14.0, 0.0);
        let alpha = 1.0 / 3.0;
        let ray = phi_oscillatory_integral(&phi, 0, alpha, 2, s, 1e-12).unwrap();
        let breaks: Vec<f64> = (1..6000).map(|i| 1.0 + 1.5 * i as f64).collect();
        let real = integrate_with_breaks(
            |x| C64::new((x.powi(11) + 1.0) * x.ln() / (x - 1.0) * x.powf(-14.0), 0.0) * e(2.0 * alpha * x),
            1.0 + 1e-300,
            9001.0,
            &breaks,
            QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 20000 },
        )
        .unwrap();
        // tail beyond 9001 is below ∫x^{−3}log x
        assert!((ray - real.value).norm() < 1e-7, "{ray} vs {}", real.value);
    }

    #[test]
    fn ibp_residuals() {
        let s = C64::new(9.0, 0.0);
        assert_eq!(ibp_expansion_check(12, 1.0 / 3.0, s, 0, 1, 1e-12).unwrap(), 0.0);
        let r = ibp_expansion_check(12, 1.0 / 3.0, s, 2, 1, 1e-12).unwrap();
        assert!(r < 1e-8, "{r}");
        assert!(ibp_expansion_check(12, 1.0 / 3.0, s, 7, 1, 1e-12).is_err());
    }

    #[test]
    fn growth_is_polynomial_in_s() {
        for j in 0..=4 {
            let c = phi_growth_constant(12, j).unwrap();
            assert!(c.is_finite() && c < 50.0, "j {j}: {c}");
        }
    }

    #[test]
    fn phi_mellin_is_trigamma_sum() {
        for s in [C64::new(13.0, 0.0), C64::new(12.5, 4.0), C64::new(20.0, -3.0)] {
            let q = phi_mellin(12, s, 1e-12).unwrap();
            let c = phi_mellin_closed(12, s).unwrap();
            assert!((q - c).norm() < 1e-8, "{s}: {q} {c}");
        }
        assert!(matches!(phi_mellin(12, C64::new(9.0, 0.0), 1e-12), Err(Error::Precondition(_))));
        // ψ′ has a pole at s + 1 − k = −2
        assert!(phi_mellin_closed(12, C64::new(9.0, 0.0)).is_err());
    }

    /// ∫₁^∞φ(x)x^{−9}dx = ψ′(9) + ψ′(−2) for k = 12, as literally stated;
    /// both sides are infinite there.
    #[test]
    #[ignore]
    fn phi_mellin_literal_s9() {
        let s = C64::new(9.0, 0.0);
        let q = phi_mellin(12, s, 1e-12).unwrap();
        let c = phi_mellin_closed(12, s).unwrap();
        assert!((q - c).norm() < 1e-8);
    }
}
