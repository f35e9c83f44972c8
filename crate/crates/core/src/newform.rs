//! Newform data: construction of Δ, Hecke extension from prime coefficients,
//! the text file format, duals, character twists and the Deligne check.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::character::{gauss_sum, DirichletCharacter};
use crate::primes::{is_prime, spf_table};
use crate::{Error, Result, C64};

/// A normalised Hecke eigenform f ∈ S_k(Γ₁(N)) with nebentypus ξ, together
/// with its Fourier coefficients a(1..n_max).
#[derive(Debug, Clone, PartialEq)]
pub struct Newform {
    weight: u32,
    level: u64,
    nebentypus: DirichletCharacter,
    root_number: C64,
    coeffs: Vec<C64>,
    exact: Option<Vec<i128>>,
    label: String,
    deligne_violations: Vec<u64>,
}

/// One row of [`Newform::check_deligne`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeligneRow {
    pub p: u64,
    pub abs_ap: f64,
    pub bound: f64,
    pub strict: bool,
}

impl Newform {
    /// Builds and validates a newform. All invariants except the Deligne bound
    /// are fatal; Deligne violations are recorded and reported by
    /// [`Newform::deligne_violations`].
    pub fn new(
        weight: u32,
        level: u64,
        nebentypus: DirichletCharacter,
        root_number: C64,
        coeffs: Vec<C64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let exact = exact_sidecar(&coeffs);
        Self::with_exact(weight, level, nebentypus, root_number, coeffs, exact, label)
    }

    fn with_exact(
        weight: u32,
        level: u64,
        nebentypus: DirichletCharacter,
        root_number: C64,
        coeffs: Vec<C64>,
        exact: Option<Vec<i128>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if weight == 0 || level == 0 {
            return Err(Error::Invariant("weight and level must be positive".into()));
        }
        if coeffs.is_empty() {
            return Err(Error::Invariant("no coefficients".into()));
        }
        if nebentypus.modulus() != level {
            return Err(Error::Invariant(format!(
                "nebentypus modulus {} differs from level {level}",
                nebentypus.modulus()
            )));
        }
        if (root_number.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant(format!(
                "root number {root_number} is not unimodular"
            )));
        }
        let mut f = Self {
            weight,
            level,
            nebentypus,
            root_number,
            coeffs,
            exact,
            label: label.into(),
            deligne_violations: Vec::new(),
        };
        f.validate()?;
        f.deligne_violations = f
            .check_deligne()
            .iter()
            .filter(|r| r.abs_ap > r.bound * (1.0 + 1e-12))
            .map(|r| r.p)
            .collect();
        Ok(f)
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }
    pub fn level(&self) -> u64 {
        self.level
    }
    pub fn nebentypus(&self) -> &DirichletCharacter {
        &self.nebentypus
    }
    pub fn root_number(&self) -> C64 {
        self.root_number
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }
    /// Coefficients a(1), …, a(n_max).
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }
    /// Exact integer coefficients when the source is exact.
    pub fn exact(&self) -> Option<&[i128]> {
        self.exact.as_deref()
    }
    pub fn deligne_violations(&self) -> &[u64] {
        &self.deligne_violations
    }

    /// a(n) for 1 ≤ n ≤ n_max.
    #[inline]
    pub fn a(&self, n: usize) -> C64 {
        self.coeffs[n - 1]
    }

    /// ξ(n).
    pub fn xi(&self, n: u64) -> C64 {
        self.nebentypus.eval(n)
    }

    /// True when f̄ = f: real coefficients and real nebentypus.
    pub fn is_self_dual(&self) -> bool {
        self.nebentypus.is_real() && self.coeffs.iter().all(|a| a.im.abs() <= 1e-12 * a.norm().max(1.0))
    }

    /// Same form with coefficients truncated to n ≤ `n_max`.
    pub fn truncated(&self, n_max: usize) -> Self {
        let n = n_max.min(self.coeffs.len()).max(1);
        let mut out = self.clone();
        out.coeffs.truncate(n);
        if let Some(ex) = out.exact.as_mut() {
            ex.truncate(n);
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let n_max = self.coeffs.len();
        if (self.coeffs[0] - 1.0).norm() > 1e-12 {
            return Err(Error::Invariant(format!("a(1) = {} is not 1", self.coeffs[0])));
        }
        let k = self.weight as i32;
        let spf = spf_table(n_max);
        let tol = |x: C64, y: C64, scale: f64| (x - y).norm() <= 1e-9 * scale.max(1.0);
        // Multiplicativity through the prime-power factorisation of each n.
        for n in 2..=n_max {
            let p = spf[n] as usize;
            let mut pe = 1;
            let mut m = n;
            while m % p == 0 {
                m /= p;
                pe *= p;
            }
            if m > 1 {
                let prod = self.a(pe) * self.a(m);
                if !tol(self.a(n), prod, prod.norm().max(self.a(n).norm())) {
                    return Err(Error::Invariant(format!(
                        "multiplicativity fails at n = {n}: a({n}) = {} but a({pe})a({m}) = {prod}",
                        self.a(n)
                    )));
                }
            }
        }
        for p in (2..=n_max).filter(|&p| spf[p] as usize == p) {
            let ramified = self.level.is_multiple_of(p as u64);
            let ap = self.a(p);
            let mut prev2 = C64::new(1.0, 0.0);
            let mut prev = ap;
            let mut pr = p;
            while pr <= n_max / p {
                let next = pr * p;
                let expect = if ramified {
                    prev * ap
                } else {
                    let chi_term =
                        self.xi(p as u64) * (p as f64).powi(k - 1) * prev2;
                    ap * prev - chi_term
                };
                let scale = (ap * prev).norm() + if ramified { 0.0 } else { (p as f64).powi(k - 1) * prev2.norm() };
                if !tol(self.a(next), expect, scale) {
                    return Err(Error::Invariant(format!(
                        "Hecke relation fails at p = {p}, n = {next}: a({next}) = {} but recursion gives {expect}",
                        self.a(next)
                    )));
                }
                prev2 = prev;
                prev = self.a(next);
                pr = next;
            }
        }
        Ok(())
    }

    /// The dual form f̄: conjugated coefficients, nebentypus and root number.
    pub fn dual(&self) -> Self {
        Self {
            weight: self.weight,
            level: self.level,
            nebentypus: self.nebentypus.conj(),
            root_number: self.root_number.conj(),
            coeffs: self.coeffs.iter().map(|a| a.conj()).collect(),
            exact: self.exact.clone(),
            label: if let Some(stripped) = self.label.strip_suffix("-dual") {
                stripped.to_string()
            } else {
                format!("{}-dual", self.label)
            },
            deligne_violations: self.deligne_violations.clone(),
        }
    }

    /// f ⊗ χ for a non-trivial character χ modulo a prime q ∤ N.
    ///
    /// Level Nq², nebentypus ξχ², root number ε ξ(q) χ(N) τ(χ)²/q.
    pub fn twist(&self, chi: &DirichletCharacter) -> Result<Self> {
        let q = chi.modulus();
        if !is_prime(q) {
            return Err(Error::Precondition(format!("twist modulus {q} is not prime")));
        }
        if self.level.is_multiple_of(q) {
            return Err(Error::Precondition(format!("{q} divides the level {}", self.level)));
        }
        if chi.is_trivial() {
            return Err(Error::Precondition("twisting character must be non-trivial".into()));
        }
        let coeffs: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| a * chi.eval(i as u64 + 1))
            .collect();
        let exact = match (&self.exact, chi.is_real()) {
            (Some(ex), true) => Some(
                ex.iter()
                    .enumerate()
                    .map(|(i, &a)| a * chi.eval(i as u64 + 1).re.round() as i128)
                    .collect(),
            ),
            _ => None,
        };
        let new_level = self.level * q * q;
        let nebentypus = self.nebentypus.product_mod(&chi.pow(2), new_level)?;
        let tau = gauss_sum(chi);
        let root_number = self.root_number
            * self.xi(q)
            * chi.eval(self.level)
            * tau
            * tau
            / q as f64;
        Self::with_exact(
            self.weight,
            new_level,
            nebentypus,
            root_number,
            coeffs,
            exact,
            format!("{}x{}", self.label, character_tag(chi)),
        )
    }

    /// (p, |a(p)|, 2p^{(k−1)/2}, strict?) for every prime p ≤ n_max, p ∤ N.
    pub fn check_deligne(&self) -> Vec<DeligneRow> {
        let k = self.weight as f64;
        (2..=self.coeffs.len())
            .filter(|&p| is_prime(p as u64) && !self.level.is_multiple_of(p as u64))
            .map(|p| {
                let bound = 2.0 * (p as f64).powf((k - 1.0) / 2.0);
                let abs_ap = match &self.exact {
                    Some(ex) => (ex[p - 1] as f64).abs(),
                    None => self.a(p).norm(),
                };
                let strict = match &self.exact {
                    // a² < 4p^{k−1} decided in exact arithmetic
                    Some(ex) if self.nebentypus.is_trivial() => {
                        use num_bigint::BigInt;
                        let a = BigInt::from(ex[p - 1]);
                        &a * &a < BigInt::from(4) * BigInt::from(p).pow(self.weight - 1)
                    }
                    _ => abs_ap < bound * (1.0 - 1e-12),
                };
                DeligneRow {
                    p: p as u64,
                    abs_ap,
                    bound,
                    strict,
                }
            })
            .collect()
    }

    /// Serialises to the line-oriented text format read by [`parse_newform`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            self.weight,
            self.level,
            self.root_number.re,
            self.root_number.im,
            self.coeffs.len(),
            self.label
        );
        out.push_str("chi");
        for v in self.nebentypus.values() {
            let _ = write!(out, " {},{}", v.re, v.im);
        }
        out.push('\n');
        for (i, a) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{} {} {}", i + 1, a.re, a.im);
        }
        out
    }
}

fn character_tag(chi: &DirichletCharacter) -> String {
    let q = chi.modulus();
    if chi.is_real() {
        format!("chi{q}")
    } else {
        // identify χ by its value at the least primitive root
        let g = crate::primes::primitive_root(q);
        let v = chi.eval(g);
        let j = (v.arg() / std::f64::consts::TAU * (q - 1) as f64).round() as i64;
        format!("chi{q}.{}", j.rem_euclid(q as i64 - 1))
    }
}

fn exact_sidecar(coeffs: &[C64]) -> Option<Vec<i128>> {
    const LIMIT: f64 = 9.007_199_254_740_992e15; // 2^53
    coeffs
        .iter()
        .map(|a| {
            if a.im == 0.0 && a.re.fract() == 0.0 && a.re.abs() <= LIMIT {
                Some(a.re as i128)
            } else {
                None
            }
        })
        .collect()
}

/// Coefficients of ∏_{m≥1}(1 − q^m)^power up to q^{len−1}, by `power`
/// successive multiplications with the sparse pentagonal-number series.
pub fn eta_product_power(power: u32, len: usize) -> Result<Vec<i128>> {
    // Euler: ∏(1 − q^m) = Σ_j (−1)^j q^{j(3j−1)/2}, j ∈ ℤ
    let mut pent: Vec<(usize, i128)> = vec![(0, 1)];
    let mut j: usize = 1;
    loop {
        let sign = if j % 2 == 1 { -1 } else { 1 };
        let g1 = j * (3 * j - 1) / 2;
        let g2 = j * (3 * j + 1) / 2;
        if g1 >= len {
            break;
        }
        pent.push((g1, sign));
        if g2 < len {
            pent.push((g2, sign));
        }
        j += 1;
    }
    let mut cur = vec![0i128; len];
    cur[0] = 1;
    for _ in 0..power {
        let mut next = vec![0i128; len];
        for &(g, sign) in &pent {
            for (i, &c) in cur[..len - g].iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let term = if sign > 0 { c } else { -c };
                next[i + g] = next[i + g]
                    .checked_add(term)
                    .ok_or(Error::Overflow(i + g + 1))?;
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Ramanujan τ(n) for 1 ≤ n ≤ n_max as exact integers.
pub fn ramanujan_tau(n_max: usize) -> Result<Vec<i128>> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    eta_product_power(24, n_max)
}

/// The discriminant form Δ = q∏(1 − q^n)^{24}: k = 12, N = 1, ε = 1.
pub fn delta_coefficients(n_max: usize) -> Result<Newform> {
    let tau = ramanujan_tau(n_max)?;
    let coeffs = tau.iter().map(|&t| C64::new(t as f64, 0.0)).collect();
    Newform::with_exact(
        12,
        1,
        DirichletCharacter::trivial(1),
        C64::new(1.0, 0.0),
        coeffs,
        Some(tau),
        "Delta",
    )
}

/// Extends prime coefficients a(p) to a(1..n_max) through the Hecke recursion
/// a(p^{r+1}) = a(p)a(p^r) − ξ(p)p^{k−1}a(p^{r−1}) for p ∤ N, a(p^r) = a(p)^r
/// for p | N, and multiplicativity.
pub fn hecke_extend(
    primes: &BTreeMap<u64, C64>,
    weight: u32,
    level: u64,
    nebentypus: &DirichletCharacter,
    n_max: usize,
) -> Result<Vec<C64>> {
    let pk = |p: u64| (p as f64).powi(weight as i32 - 1);
    extend_generic(n_max, |p| primes.get(&p).copied(), |p, ap, prev, prev2| {
        if level.is_multiple_of(p) {
            Some(ap * prev)
        } else {
            Some(ap * prev - nebentypus.eval(p) * pk(p) * prev2)
        }
    }, C64::new(1.0, 0.0))
}

/// Exact-integer [`hecke_extend`] for trivial nebentypus.
pub fn hecke_extend_exact(
    primes: &BTreeMap<u64, i128>,
    weight: u32,
    level: u64,
    n_max: usize,
) -> Result<Vec<i128>> {
    extend_generic(
        n_max,
        |p| primes.get(&p).copied(),
        |p, ap, prev, prev2| {
            if level.is_multiple_of(p) {
                ap.checked_mul(prev)
            } else {
                let pk = (p as i128).checked_pow(weight - 1)?;
                ap.checked_mul(prev)?.checked_sub(pk.checked_mul(prev2)?)
            }
        },
        1i128,
    )
}

fn extend_generic<T, G, R>(n_max: usize, mut get: G, mut recur: R, one: T) -> Result<Vec<T>>
where
    T: Copy + std::ops::Mul<Output = T>,
    G: FnMut(u64) -> Option<T>,
    R: FnMut(u64, T, T, T) -> Option<T>,
{
    let spf = spf_table(n_max);
    let mut a: Vec<Option<T>> = vec![None; n_max + 1];
    if n_max >= 1 {
        a[1] = Some(one);
    }
    for p in (2..=n_max).filter(|&p| spf[p] as usize == p) {
        let ap = get(p as u64).ok_or(Error::MissingPrime(p as u64))?;
        a[p] = Some(ap);
        let (mut prev2, mut prev) = (one, ap);
        let mut pr = p;
        while pr <= n_max / p {
            let next = pr * p;
            let v = recur(p as u64, ap, prev, prev2).ok_or(Error::Overflow(next))?;
            a[next] = Some(v);
            prev2 = prev;
            prev = v;
            pr = next;
        }
    }
    for n in 2..=n_max {
        if a[n].is_some() {
            continue;
        }
        let p = spf[n] as usize;
        let mut m = n;
        let mut pe = 1;
        while m % p == 0 {
            m /= p;
            pe *= p;
        }
        let v = a[pe].expect("prime powers filled first") * a[m].expect("smaller index filled");
        a[n] = Some(v);
    }
    Ok(a.into_iter().skip(1).map(|v| v.expect("all filled")).collect())
}

/// Parses the text format:
///
/// ```text
/// k N eps_re eps_im n_max label
/// chi re,im re,im ...        (N values, residues 0..N−1)
/// n re im                    (n = 1..n_max)
/// ```
///
/// Lines starting with `#` and blank lines are ignored.
pub fn parse_newform(text: &str) -> Result<Newform> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let perr = |line: usize, message: String| Error::Parse { line, message };

    let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5 {
        return Err(perr(ln, format!("header needs `k N eps_re eps_im n_max label`, got {header:?}")));
    }
    let k: u32 = fields[0].parse().map_err(|e| perr(ln, format!("weight: {e}")))?;
    let level: u64 = fields[1].parse().map_err(|e| perr(ln, format!("level: {e}")))?;
    let eps_re: f64 = fields[2].parse().map_err(|e| perr(ln, format!("eps_re: {e}")))?;
    let eps_im: f64 = fields[3].parse().map_err(|e| perr(ln, format!("eps_im: {e}")))?;
    let n_max: usize = fields[4].parse().map_err(|e| perr(ln, format!("n_max: {e}")))?;
    let label = fields[5..].join(" ");

    let (ln, chi_line) = lines.next().ok_or_else(|| perr(ln + 1, "missing chi line".into()))?;
    let mut parts = chi_line.split_whitespace();
    if parts.next() != Some("chi") {
        return Err(perr(ln, "second line must start with `chi`".into()));
    }
    let values = parts
        .map(|pair| {
            let (re, im) = pair
                .split_once(',')
                .ok_or_else(|| perr(ln, format!("expected re,im pair, got {pair:?}")))?;
            Ok(C64::new(
                re.parse().map_err(|e| perr(ln, format!("{e}")))?,
                im.parse().map_err(|e| perr(ln, format!("{e}")))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() as u64 != level {
        return Err(perr(ln, format!("expected {level} character values, got {}", values.len())));
    }
    let chi = DirichletCharacter::from_values(values).map_err(|e| perr(ln, e.to_string()))?;

    let mut coeffs = Vec::with_capacity(n_max);
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(perr(ln, format!("expected `n re im`, got {line:?}")));
        }
        let n: usize = f[0].parse().map_err(|e| perr(ln, format!("index: {e}")))?;
        if n != coeffs.len() + 1 {
            return Err(perr(ln, format!("expected n = {}, got {n}", coeffs.len() + 1)));
        }
        let re: f64 = f[1].parse().map_err(|e| perr(ln, format!("{e}")))?;
        let im: f64 = f[2].parse().map_err(|e| perr(ln, format!("{e}")))?;
        coeffs.push(C64::new(re, im));
    }
    if coeffs.len() != n_max {
        return Err(perr(0, format!("header promises {n_max} coefficients, found {}", coeffs.len())));
    }
    Newform::new(k, level, chi, C64::new(eps_re, eps_im), coeffs, label)
}

pub fn load_newform(path: impl AsRef<Path>) -> Result<Newform> {
    let text = std::fs::read_to_string(path)?;
    parse_newform(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::character_table;

    #[test]
    fn delta_small_coefficients() {
        let d = delta_coefficients(12).unwrap();
        let ex = d.exact().unwrap();
        assert_eq!(&ex[..6], &[1, -24, 252, -1472, 4830, -6048]);
        assert_eq!(ex[8], -113643);
        assert_eq!(ex[11], ex[3] * ex[2]);
    }

    #[test]
    fn hecke_recursion_small() {
        let mut primes = BTreeMap::new();
        for (p, t) in [(2u64, -24i128), (3, 252), (5, 4830), (7, -16744), (11, 534612)] {
            primes.insert(p, t);
        }
        let a = hecke_extend_exact(&primes, 12, 1, 12).unwrap();
        assert_eq!(a[3], -1472);
        assert_eq!(a[8], -113643);
        assert_eq!(a[11], a[3] * a[2]);
        primes.remove(&7);
        assert_eq!(hecke_extend_exact(&primes, 12, 1, 12), Err(Error::MissingPrime(7)));
    }

    #[test]
    fn complex_hecke_matches_exact() {
        let d = delta_coefficients(200).unwrap();
        let primes: BTreeMap<u64, C64> = (2..=200u64)
            .filter(|&p| is_prime(p))
            .map(|p| (p, d.a(p as usize)))
            .collect();
        let a = hecke_extend(&primes, 12, 1, &DirichletCharacter::trivial(1), 200).unwrap();
        for n in 1..=200 {
            assert!((a[n - 1] - d.a(n)).norm() <= 1e-12 * d.a(n).norm().max(1.0));
        }
    }

    #[test]
    fn round_trip_text() {
        let d = delta_coefficients(50).unwrap();
        let back = parse_newform(&d.to_text()).unwrap();
        assert_eq!(back.coeffs(), d.coeffs());
        assert_eq!(back.exact(), d.exact());
        assert_eq!(back.weight(), 12);
        assert_eq!(back.label(), "Delta");
    }

    #[test]
    fn broken_multiplicativity_is_rejected() {
        let d = delta_coefficients(10).unwrap();
        let text = d.to_text().replace("\n6 -6048 0\n", "\n6 -6047 0\n");
        match parse_newform(&text) {
            Err(Error::Invariant(msg)) => assert!(msg.contains("n = 6"), "{msg}"),
            other => panic!("expected invariant error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_newform("# comment\n12 1 1 0 2 x\nchi 1,0\n1 1 0\n3 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err:?}");
        let err = parse_newform("12 1 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn deligne_warning_not_fatal() {
        // weight 2, level 1, a(2) = 3 > 2√2 and a(p) = 0 otherwise
        let n_max = 8;
        let mut primes = BTreeMap::new();
        for p in [2u64, 3, 5, 7] {
            primes.insert(p, C64::new(if p == 2 { 3.0 } else { 0.0 }, 0.0));
        }
        let coeffs = hecke_extend(&primes, 2, 1, &DirichletCharacter::trivial(1), n_max).unwrap();
        let f = Newform::new(2, 1, DirichletCharacter::trivial(1), C64::new(1.0, 0.0), coeffs, "synthetic").unwrap();
        assert_eq!(f.deligne_violations(), &[2]);
    }

    #[test]
    fn deligne_for_delta() {
        let d = delta_coefficients(1000).unwrap();
        let rows = d.check_deligne();
        assert_eq!(rows[0].p, 2);
        assert_eq!(rows[0].abs_ap, 24.0);
        assert!((rows[0].bound - 90.509_667_991_878_08).abs() < 1e-9);
        assert!(rows.iter().all(|r| r.strict));
        assert!(d.deligne_violations().is_empty());
    }

    #[test]
    fn equality_case_is_not_strict() {
        // weight 1: a(p) = 2 = 2p^0 at every prime (E-series style data)
        let n_max = 10;
        let mut primes = BTreeMap::new();
        for p in [2u64, 3, 5, 7] {
            primes.insert(p, C64::new(2.0, 0.0));
        }
        let coeffs = hecke_extend(&primes, 1, 1, &DirichletCharacter::trivial(1), n_max).unwrap();
        let f = Newform::new(1, 1, DirichletCharacter::trivial(1), C64::new(1.0, 0.0), coeffs, "square").unwrap();
        assert!(f.check_deligne().iter().all(|r| !r.strict));
        assert!(f.deligne_violations().is_empty());
    }

    #[test]
    fn dual_and_twist() {
        let d = delta_coefficients(100).unwrap();
        assert_eq!(d.dual().coeffs(), d.coeffs());
        assert_eq!(d.dual().dual(), d);
        let chars = character_table(5).unwrap();
        let t = d.twist(&chars[2]).unwrap();
        assert_eq!(t.level(), 25);
        assert_eq!(t.a(10), C64::new(0.0, 0.0));
        assert!((t.root_number() - 1.0).norm() < 1e-12);
        for n in 1..=100u64 {
            let expect = d.a(n as usize) * chars[2].eval(n);
            assert_eq!(t.a(n as usize), expect);
        }
        assert!(t.twist(&chars[2]).is_err());
        let c = d.twist(&chars[1]).unwrap();
        assert!(!c.is_self_dual());
        let cd = c.dual();
        assert!((cd.a(2) - c.a(2).conj()).norm() == 0.0);
        assert!((c.root_number() * cd.root_number() - 1.0).norm() < 1e-12);
        assert!(d.twist(&chars[0]).is_err());
    }
}
