//! Truncated Dirichlet-series algebra and exact identities: the coefficients
//! ℓ(n) of log L_f and c_f(n) of D_f, the character expansion of e(n/q),
//! Vandermonde elimination and Chu–Vandermonde.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::character::{character_table, gauss_sum, DirichletCharacter};
use crate::newform::Newform;
use crate::poly::{rat, RatPoly};
use crate::primes::{gcd, is_prime, spf_table};
use crate::{e, Error, Result, C64};

/// Dense coefficients c(1..n_max) of a truncated Dirichlet series.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSeriesCoeffs {
    coeffs: Vec<C64>,
    pub description: String,
}

/// Exact rational solution vector.
pub type RationalVector = Vec<BigRational>;

impl DirichletSeriesCoeffs {
    pub fn new(coeffs: Vec<C64>, description: impl Into<String>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least c(1)");
        Self {
            coeffs,
            description: description.into(),
        }
    }

    /// The unit series 1, 0, 0, ….
    pub fn identity(n_max: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); n_max];
        c[0] = C64::new(1.0, 0.0);
        Self::new(c, "identity")
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// c(n), 1-based.
    #[inline]
    pub fn get(&self, n: usize) -> C64 {
        self.coeffs[n - 1]
    }

    /// Dirichlet convolution (A*B)(n) = Σ_{d|n} A(d)B(n/d).
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.n_max() != other.n_max() {
            return Err(Error::Precondition(format!(
                "convolution of lengths {} and {}",
                self.n_max(),
                other.n_max()
            )));
        }
        let n = self.n_max();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for d in 1..=n {
            let a = self.get(d);
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for m in 1..=n / d {
                out[d * m - 1] += a * other.get(m);
            }
        }
        Ok(Self::new(
            out,
            format!("({})*({})", self.description, other.description),
        ))
    }

    /// n ↦ c(n)χ(n).
    pub fn twist(&self, chi: &DirichletCharacter) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c * chi.eval(i as u64 + 1))
                .collect(),
            format!("{}·chi{}", self.description, chi.modulus()),
        )
    }
}

/// ℓ(p^m) for p ∤ N via Newton's identity S_m = a S_{m−1} − ξ(p)p^{k−1} S_{m−2}
/// (S_0 = 2, S_1 = a(p)), where S_m = α^m + β^m; ℓ(p^m) = a(p)^m/m for p | N.
pub fn log_l_coefficients(f: &Newform, n_max: usize) -> Result<DirichletSeriesCoeffs> {
    if n_max > f.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: n_max,
            available: f.n_max(),
        });
    }
    let k = f.weight() as i32;
    let spf = spf_table(n_max);
    let mut ell = vec![C64::new(0.0, 0.0); n_max];
    for p in (2..=n_max).filter(|&p| spf[p] as usize == p) {
        let ap = f.a(p);
        let ramified = f.level().is_multiple_of(p as u64);
        let c = f.xi(p as u64) * (p as f64).powi(k - 1);
        let (mut s2, mut s1) = (C64::new(2.0, 0.0), ap);
        let mut pm = p;
        let mut m = 1;
        loop {
            ell[pm - 1] = if ramified { ap.powu(m) / m as f64 } else { s1 / m as f64 };
            if pm > n_max / p {
                break;
            }
            pm *= p;
            m += 1;
            let s = ap * s1 - c * s2;
            s2 = s1;
            s1 = s;
        }
    }
    Ok(DirichletSeriesCoeffs::new(
        ell,
        format!("log L({})", f.label()),
    ))
}

/// Formal exponential: given ℓ with ℓ(1) = 0, returns the series A with
/// A(1) = 1 and A(n) log n = Σ_{d|n, d>1} ℓ(d) log d · A(n/d).
pub fn formal_exp(ell: &DirichletSeriesCoeffs) -> DirichletSeriesCoeffs {
    let n = ell.n_max();
    let mut a = vec![C64::new(0.0, 0.0); n];
    a[0] = C64::new(1.0, 0.0);
    // Accumulate Σ ℓ(d) log d · A(m) into index dm once A(m) is final.
    let mut acc = vec![C64::new(0.0, 0.0); n];
    for m in 1..=n {
        if m > 1 {
            a[m - 1] = acc[m - 1] / (m as f64).ln();
        }
        let am = a[m - 1];
        if am == C64::new(0.0, 0.0) {
            continue;
        }
        for d in 2..=n / m {
            let l = ell.get(d);
            if l != C64::new(0.0, 0.0) {
                acc[d * m - 1] += l * (d as f64).ln() * am;
            }
        }
    }
    DirichletSeriesCoeffs::new(a, format!("exp({})", ell.description))
}

/// c_f = a_f * (ℓ·log²), the coefficients of D_f = L_f·(log L_f)''.
pub fn d_coefficients(f: &Newform, n_max: usize) -> Result<DirichletSeriesCoeffs> {
    let ell = log_l_coefficients(f, n_max)?;
    let m: Vec<C64> = ell
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &l)| l * ((i + 1) as f64).ln().powi(2))
        .collect();
    let a = DirichletSeriesCoeffs::new(f.coeffs()[..n_max].to_vec(), f.label());
    let mut c = a.convolve(&DirichletSeriesCoeffs::new(m, ""))?;
    c.description = format!("D({})", f.label());
    Ok(c)
}

/// The right-hand side 1 − (q/(q−1))χ₀(n) + (1/(q−1))Σ_{χ≠χ₀} τ(χ̄)χ(n) of the
/// character expansion of e(n/q), for n = 0..q−1.
pub fn exp_decomposition_table(q: u64) -> Result<Vec<C64>> {
    let chars = character_table(q)?;
    let qf = q as f64;
    let taus: Vec<C64> = chars[1..].iter().map(|c| gauss_sum(&c.conj())).collect();
    Ok((0..q)
        .map(|n| {
            let mut s = C64::new(1.0, 0.0) - chars[0].eval(n) * (qf / (qf - 1.0));
            let mut sum = C64::new(0.0, 0.0);
            for (chi, tau) in chars[1..].iter().zip(&taus) {
                sum += tau * chi.eval(n);
            }
            s += sum / (qf - 1.0);
            s
        })
        .collect())
}

/// max_n |e(n/q) − expansion(n)| over residues n mod q.
pub fn exp_decomposition_check(q: u64) -> Result<f64> {
    let table = exp_decomposition_table(q)?;
    Ok(table
        .iter()
        .enumerate()
        .map(|(n, v)| (e(n as f64 / q as f64) - v).norm())
        .fold(0.0, f64::max))
}

/// max_n |c(n)e(n/q) − c(n)·expansion(n)| / max(1, |c(n)|) for n ≤ n_max.
pub fn twist_coefficient_decomposition_check(f: &Newform, q: u64, n_max: usize) -> Result<f64> {
    if f.level().is_multiple_of(q) {
        return Err(Error::Precondition(format!("{q} divides the level")));
    }
    let c = d_coefficients(f, n_max)?;
    let table = exp_decomposition_table(q)?;
    Ok((1..=n_max)
        .map(|n| {
            let cn = c.get(n);
            let lhs = cn * e((n as u64 % q) as f64 / q as f64);
            let rhs = cn * table[(n as u64 % q) as usize];
            (lhs - rhs).norm() / cn.norm().max(1.0)
        })
        .fold(0.0, f64::max))
}

/// The first `count` primes congruent to q modulo N.
pub fn dirichlet_primes(q: u64, level: u64, count: usize) -> Result<Vec<u64>> {
    const CAP: u64 = 100_000_000;
    if level == 0 || gcd(q, level) != 1 {
        return Err(Error::Precondition(format!("gcd({q}, {level}) must be 1")));
    }
    let mut out = Vec::with_capacity(count);
    let mut x = q % level;
    if x == 0 {
        x = level;
    }
    while out.len() < count {
        if x > CAP {
            return Err(Error::SearchCap(CAP));
        }
        if is_prime(x) {
            out.push(x);
        }
        x += level;
    }
    Ok(out)
}

/// Exact c_1..c_M with Σ_j c_j q_j^{−m} = δ_{m,m0} for m = 0..M−1.
///
/// c_j is the t^{m0} coefficient of the Lagrange basis polynomial
/// Π_{i≠j}(t − x_i)/(x_j − x_i) on the nodes x_i = 1/q_i.
pub fn vandermonde_solve(qs: &[u64], m0: usize) -> Result<RationalVector> {
    let m = qs.len();
    if m0 >= m {
        return Err(Error::Precondition(format!("m0 = {m0} must be below M = {m}")));
    }
    for (i, a) in qs.iter().enumerate() {
        if *a == 0 || qs[..i].contains(a) {
            return Err(Error::Singular(format!("nodes not distinct and nonzero: {qs:?}")));
        }
    }
    let x: Vec<BigRational> = qs.iter().map(|&q| rat(1, q as i64)).collect();
    let c: RationalVector = (0..m)
        .map(|j| {
            let mut basis = RatPoly::constant(BigRational::one());
            for i in (0..m).filter(|&i| i != j) {
                let denom = &x[j] - &x[i];
                let factor = RatPoly::linear(-&x[i] / &denom, BigRational::one() / &denom);
                basis = &basis * &factor;
            }
            basis.coeff(m0)
        })
        .collect();
    // exact back-substitution
    for row in 0..m {
        let lhs: BigRational = c
            .iter()
            .zip(&x)
            .map(|(cj, xj)| cj * pow_rat(xj, row))
            .fold(BigRational::zero(), |a, b| a + b);
        let expect = if row == m0 { BigRational::one() } else { BigRational::zero() };
        if lhs != expect {
            return Err(Error::Invariant(format!("Vandermonde residual nonzero in row {row}")));
        }
    }
    Ok(c)
}

fn pow_rat(x: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// Both sides of Σ_{j=0}^m binom(m+k−1, m−j) binom(−s−m, j) = (−1)^m binom(s+m−k, m)
/// as exact polynomials in s.
pub fn chu_vandermonde_sides(m: usize, k: usize) -> (RatPoly, RatPoly) {
    let big = |n: usize| BigRational::from_integer(BigInt::from(n));
    let mut lhs = RatPoly::zero();
    for j in 0..=m {
        let top = RatPoly::constant(big(m + k - 1)).binomial(m - j);
        let bottom = RatPoly::linear(-big(m), -BigRational::one()).binomial(j);
        lhs = &lhs + &(&top * &bottom);
    }
    let shift = BigRational::from_integer(BigInt::from(m as i64 - k as i64));
    let mut rhs = RatPoly::linear(shift, BigRational::one()).binomial(m);
    if m % 2 == 1 {
        rhs = -&rhs;
    }
    (lhs, rhs)
}

/// Exact coefficient-wise comparison of [`chu_vandermonde_sides`].
pub fn chu_vandermonde_check(m: usize, k: usize) -> Result<bool> {
    if m > 30 || !(1..=30).contains(&k) {
        return Err(Error::Precondition(format!("need m ≤ 30 and 1 ≤ k ≤ 30, got m = {m}, k = {k}")));
    }
    let (lhs, rhs) = chu_vandermonde_sides(m, k);
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newform::delta_coefficients;

    #[test]
    fn convolution_identity_and_divisors() {
        let ones = DirichletSeriesCoeffs::new(vec![C64::new(1.0, 0.0); 30], "1");
        let id = DirichletSeriesCoeffs::identity(30);
        assert_eq!(id.convolve(&ones).unwrap(), DirichletSeriesCoeffs { description: "(identity)*(1)".into(), ..ones.clone() });
        let d = ones.convolve(&ones).unwrap();
        assert_eq!(d.get(12), C64::new(6.0, 0.0));
        assert!(ones.convolve(&DirichletSeriesCoeffs::identity(3)).is_err());
    }

    #[test]
    fn ell_values_for_delta() {
        let d = delta_coefficients(100).unwrap();
        let ell = log_l_coefficients(&d, 100).unwrap();
        assert_eq!(ell.get(2), C64::new(-24.0, 0.0));
        assert_eq!(ell.get(4), C64::new(-1760.0, 0.0));
        assert_eq!(ell.get(6), C64::new(0.0, 0.0));
        assert_eq!(ell.get(1), C64::new(0.0, 0.0));
    }

    #[test]
    fn c_values_for_delta() {
        let d = delta_coefficients(100).unwrap();
        let c = d_coefficients(&d, 100).unwrap();
        let l2 = 2f64.ln().powi(2);
        assert_eq!(c.get(1), C64::new(0.0, 0.0));
        assert!((c.get(2).re + 24.0 * l2).abs() < 1e-12);
        assert!((c.get(2).re + 11.530_9).abs() < 1e-4);
        assert!((c.get(4).re + 6464.0 * l2).abs() < 1e-9);
    }

    #[test]
    fn exp_expansion() {
        assert!(exp_decomposition_check(3).unwrap() < 1e-14);
        assert!(exp_decomposition_check(7).unwrap() < 1e-13);
        let t = exp_decomposition_table(11).unwrap();
        assert!((t[0] - 1.0).norm() < 1e-13);
    }

    #[test]
    fn primes_in_progressions() {
        assert_eq!(dirichlet_primes(2, 1, 3).unwrap(), vec![2, 3, 5]);
        assert_eq!(dirichlet_primes(3, 4, 3).unwrap(), vec![3, 7, 11]);
        assert_eq!(dirichlet_primes(2, 5, 2).unwrap(), vec![2, 7]);
        assert!(dirichlet_primes(2, 4, 1).is_err());
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_solve(&[7], 0).unwrap(), vec![rat(1, 1)]);
        assert_eq!(vandermonde_solve(&[2, 3], 0).unwrap(), vec![rat(-2, 1), rat(3, 1)]);
        assert_eq!(vandermonde_solve(&[2, 3], 1).unwrap(), vec![rat(6, 1), rat(-6, 1)]);
        assert!(matches!(vandermonde_solve(&[2, 2], 0), Err(Error::Singular(_))));
    }

    #[test]
    fn chu_vandermonde_small() {
        let (l, r) = chu_vandermonde_sides(0, 5);
        assert_eq!(l, RatPoly::constant(rat(1, 1)));
        assert_eq!(r, l);
        for k in 1..=6 {
            let (l, r) = chu_vandermonde_sides(1, k);
            let expect = RatPoly::linear(rat(k as i64 - 1, 1), rat(-1, 1));
            assert_eq!(l, expect);
            assert_eq!(r, expect);
        }
        assert!(chu_vandermonde_check(3, 12).unwrap());
        assert!(chu_vandermonde_check(31, 1).is_err());
    }
}
