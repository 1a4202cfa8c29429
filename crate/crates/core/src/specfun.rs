//! Pochhammer symbols, log-gamma, the Gauss hypergeometric series and the
//! closed forms of its weighted sums at `z = 1`.
//!
//! Every closed form here has a brute-force counterpart that only sums the
//! series term by term; the two routes never share code beyond the term
//! recurrence.

use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::series::check_closed_disk;

/// Oracle summation stops once a weighted term drops below this magnitude.
pub const TERM_CUTOFF: f64 = 1e-16;
/// Oracle summation cap.
pub const MAX_TERMS: usize = 100_000;
/// First checkpoint of the extrapolation ladder; later ones double it.
const LADDER_START: usize = 512;
const LADDER_LEVELS: usize = 8;
/// Series with `c - a - b` below this are flagged as slowly convergent.
pub const SLOW_CONVERGENCE: f64 = 0.1;

/// Rising factorial `x (x+1) ... (x+n-1)` by direct product; `(x)_0 = 1`.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).map(|k| x + k as f64).product()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Exact binomial coefficient as an integer-valued float (`m` small).
pub fn binomial(m: usize, n: usize) -> f64 {
    if n > m {
        return 0.0;
    }
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for k in 0..n {
        acc = acc * (m - k) as u128 / (k + 1) as u128;
    }
    acc as f64
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma needs a positive argument, got {x}"));
    }
    Ok(libm::lgamma(x))
}

/// `Some(m)` if `x = -m` for a nonnegative integer `m`.
pub fn nonpositive_integer(x: f64) -> Option<u64> {
    (x <= 0.0 && x.fract() == 0.0 && x > -9.0e15).then(|| (-x) as u64)
}

/// `prod Gamma(num) / prod Gamma(den)` in log space with signs; a pole in the
/// denominator gives 0.
fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    if den.iter().any(|&x| nonpositive_integer(x).is_some()) {
        return Ok(0.0);
    }
    if let Some(x) = num.iter().find(|&&x| nonpositive_integer(x).is_some()) {
        return domain(format!("Gamma has a pole at {x}"));
    }
    let mut log = 0.0;
    let mut sign = 1;
    for &x in num {
        let (l, s) = libm::lgamma_r(x);
        log += l;
        sign *= s;
    }
    for &x in den {
        let (l, s) = libm::lgamma_r(x);
        log -= l;
        sign *= s;
    }
    Ok(sign as f64 * log.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHyper")]
pub struct HypergeometricParams {
    a: f64,
    b: f64,
    c: f64,
}

#[derive(Deserialize)]
struct RawHyper {
    a: f64,
    b: f64,
    c: f64,
}

impl TryFrom<RawHyper> for HypergeometricParams {
    type Error = Error;

    fn try_from(raw: RawHyper) -> Result<Self> {
        Self::new(raw.a, raw.b, raw.c)
    }
}

impl HypergeometricParams {
    /// `c` must not be zero or a negative integer.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return domain("hypergeometric parameters must be finite");
        }
        if nonpositive_integer(c).is_some() {
            return domain(format!("c = {c} is a pole of the hypergeometric series"));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `c - a - b`.
    pub fn excess(&self) -> f64 {
        self.c - self.a - self.b
    }

    /// Degree of the polynomial when `a` or `b` is a nonpositive integer.
    pub fn terminating_degree(&self) -> Option<usize> {
        match (nonpositive_integer(self.a), nonpositive_integer(self.b)) {
            (Some(m), Some(n)) => Some(m.min(n) as usize),
            (Some(m), None) | (None, Some(m)) => Some(m as usize),
            (None, None) => None,
        }
    }
}

fn exact_integer(x: f64) -> bool {
    x.fract() == 0.0 && x.abs() < 9.0e15
}

/// `(a)_k (b)_k / k!` when `a` and `b` are integers and the value is exactly
/// representable. It is then an integer, so the division is exact.
fn integer_numerator(a: f64, b: f64, k: usize) -> Option<f64> {
    if !(exact_integer(a) && exact_integer(b)) || k > 18 {
        return None;
    }
    let pa = pochhammer(a, k);
    let pb = pochhammer(b, k);
    let prod = pa * pb;
    (exact_integer(pa) && exact_integer(pb) && exact_integer(prod)).then(|| prod / factorial(k))
}

/// Terms `t_k = (a)_k (b)_k / ((c)_k k!)` of the Gauss series.
///
/// Integer `a`, `b` use the exact product form while it is representable
/// (so polynomial cases are reproduced bit for bit); otherwise the ratio
/// `t_{k+1} = t_k (a+k)(b+k) / ((c+k)(k+1))` is used.
#[derive(Clone, Debug)]
pub struct Terms {
    p: HypergeometricParams,
    k: usize,
    current: f64,
}

impl Terms {
    pub fn new(p: HypergeometricParams) -> Self {
        Self { p, k: 0, current: 1.0 }
    }
}

impl Iterator for Terms {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let k = self.k;
        let HypergeometricParams { a, b, c } = self.p;
        let t = if k == 0 {
            1.0
        } else if let Some(num) = integer_numerator(a, b, k) {
            num / pochhammer(c, k)
        } else {
            let j = (k - 1) as f64;
            self.current * (a + j) * (b + j) / ((c + j) * (j + 1.0))
        };
        self.current = t;
        self.k += 1;
        Some(t)
    }
}

/// First `count` terms of the Gauss series.
pub fn f21_terms(p: &HypergeometricParams, count: usize) -> Vec<f64> {
    Terms::new(*p).take(count).collect()
}

/// `sum_{n=0}^{N} (a)_n (b)_n / ((c)_n n!) z^n`.
pub fn f21_truncated(p: &HypergeometricParams, z: Complex64, degree: usize) -> Result<Complex64> {
    check_closed_disk(z)?;
    if z.norm() >= 1.0 - 1e-15 && p.terminating_degree().is_none() && !(p.excess() > 0.0) {
        return Err(Error::Divergence(format!(
            "Gauss series diverges on |z| = 1 when c - a - b = {} <= 0",
            p.excess()
        )));
    }
    let terms = f21_terms(p, degree + 1);
    Ok(terms.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &t| acc * z + t))
}

/// Gauss value `F(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))`.
///
/// Terminating series are summed directly; otherwise `c - a - b > 0` is
/// required and the gamma ratio is evaluated in log space with signs.
pub fn gauss_value(p: &HypergeometricParams) -> Result<f64> {
    if let Some(m) = p.terminating_degree() {
        return Ok(neumaier(f21_terms(p, m + 1).into_iter()));
    }
    let s = p.excess();
    if !(s > 0.0) {
        return Err(Error::Divergence(format!("F(a,b;c;1) diverges for c - a - b = {s}")));
    }
    gamma_ratio(&[p.c, s], &[p.c - p.a, p.c - p.b])
}

/// Result of summing a weighted Gauss series at `z = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    pub terms_used: usize,
    /// Whether the term cutoff was not reached and the value was extrapolated.
    pub extrapolated: bool,
}

fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Sums `sum_n weight(n) t_n` term by term until a weighted term falls below
/// [`TERM_CUTOFF`] or [`MAX_TERMS`] are used.
pub fn unit_series(p: &HypergeometricParams, weight: impl Fn(usize) -> f64, tail_exponent: f64) -> SeriesSum {
    let values = Terms::new(*p).enumerate().map(|(n, t)| weight(n) * t);
    sum_to_convergence(values, p.terminating_degree(), tail_exponent)
}

/// Compensated sum of `values`, stopping after index `last` when given, or
/// once a value drops below [`TERM_CUTOFF`].
///
/// When [`MAX_TERMS`] is hit, the partial sums at `512, 1024, ..., 65536`
/// terms are Richardson-extrapolated: the tail behaves like
/// `K^-tail_exponent (e_0 + e_1/K + ...)`, so each level removes one power.
pub fn sum_to_convergence(values: impl Iterator<Item = f64>, last: Option<usize>, tail_exponent: f64) -> SeriesSum {
    let mut ladder = Vec::with_capacity(LADDER_LEVELS);
    let mut next_checkpoint = LADDER_START;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for (n, v) in values.enumerate().take(MAX_TERMS) {
        if n == next_checkpoint && ladder.len() < LADDER_LEVELS {
            ladder.push(sum + comp);
            next_checkpoint *= 2;
        }
        let s = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - s) + v } else { (v - s) + sum };
        sum = s;
        let done = match last {
            Some(m) => n >= m,
            None => n > 8 && v.abs() < TERM_CUTOFF,
        };
        if done {
            return SeriesSum { value: sum + comp, terms_used: n + 1, extrapolated: false };
        }
    }
    let value = if ladder.len() >= 2 { richardson(&ladder, tail_exponent) } else { sum + comp };
    SeriesSum { value, terms_used: MAX_TERMS, extrapolated: true }
}

/// Richardson extrapolation of partial sums at doubling cut-offs with error
/// exponents `p, p+1, p+2, ...`.
fn richardson(partials: &[f64], exponent: f64) -> f64 {
    let mut level = partials.to_vec();
    let mut power = exponent;
    while level.len() > 1 {
        let factor = 2f64.powf(power);
        level = level.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        power += 1.0;
    }
    level[0]
}

/// The converged value of `F(a, b; c; 1)` by summation only.
pub fn f21_unit_sum(p: &HypergeometricParams) -> Result<SeriesSum> {
    if p.terminating_degree().is_none() && !(p.excess() > 0.0) {
        return Err(Error::Divergence(format!("F(a,b;c;1) diverges for c - a - b = {}", p.excess())));
    }
    Ok(unit_series(p, |_| 1.0, p.excess()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    /// `sum (n+1) t_n`
    A,
    /// `sum (n+1)^2 t_n`
    B,
    /// `sum t_n / (n+1)`
    C,
}

impl FromStr for LemmaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "c" => Ok(Self::C),
            other => domain(format!("unknown lemma kind `{other}`")),
        }
    }
}

fn check_lemma(kind: LemmaKind, p: &HypergeometricParams) -> Result<()> {
    let HypergeometricParams { a, b, c } = *p;
    let ok = match kind {
        LemmaKind::A => c > a + b + 1.0,
        LemmaKind::B => c > a + b + 2.0,
        LemmaKind::C => a != 1.0 && b != 1.0 && c != 1.0 && c > (a + b + 1.0).max(0.0),
    };
    if !ok {
        return domain(format!("parameters (a, b, c) = ({a}, {b}, {c}) violate the {kind:?} sum precondition"));
    }
    Ok(())
}

/// `Gamma(c) Gamma(c-a-b-1) / (Gamma(c-a) Gamma(c-b))`.
fn shifted_gauss(p: &HypergeometricParams) -> Result<f64> {
    let HypergeometricParams { a, b, c } = *p;
    gamma_ratio(&[c, c - a - b - 1.0], &[c - a, c - b])
}

/// Closed form of `sum t_n / (n+1)`; `literal` selects the `Gamma(c-a-b-1)`
/// argument in place of the correct `Gamma(c-a-b+1)`.
pub fn lemma_c_closed_form(p: &HypergeometricParams, literal: bool) -> Result<f64> {
    let HypergeometricParams { a, b, c } = *p;
    let shift = if literal { -1.0 } else { 1.0 };
    let ratio = gamma_ratio(&[c, c - a - b + shift], &[c - a, c - b])?;
    Ok((ratio - (c - 1.0)) / ((a - 1.0) * (b - 1.0)))
}

/// Closed form of a weighted sum (kind C uses the corrected gamma argument).
pub fn lemma_closed_form(kind: LemmaKind, p: &HypergeometricParams) -> Result<f64> {
    check_lemma(kind, p)?;
    let HypergeometricParams { a, b, c } = *p;
    match kind {
        LemmaKind::A => Ok(shifted_gauss(p)? * (a * b + c - a - b - 1.0)),
        LemmaKind::B => {
            let lambda = gamma_ratio(&[c, c - a - b], &[c - a, c - b])?;
            let q = c - a - b - 1.0;
            Ok(lambda * (pochhammer(a, 2) * pochhammer(b, 2) / pochhammer(q - 1.0, 2) + 3.0 * a * b / q + 1.0))
        }
        LemmaKind::C => lemma_c_closed_form(p, false),
    }
}

/// Brute-force value of a weighted sum.
pub fn lemma_oracle(kind: LemmaKind, p: &HypergeometricParams) -> SeriesSum {
    let s = p.excess();
    match kind {
        LemmaKind::A => unit_series(p, |n| n as f64 + 1.0, s - 1.0),
        LemmaKind::B => unit_series(p, |n| (n as f64 + 1.0).powi(2), s - 2.0),
        LemmaKind::C => unit_series(p, |n| 1.0 / (n as f64 + 1.0), s + 1.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub kind: LemmaKind,
    pub closed_form: f64,
    pub oracle_value: f64,
    pub abs_gap: f64,
    pub terms_used: usize,
    pub slow_convergence: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal_closed_form: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal_gap: Option<f64>,
}

impl IdentityCheck {
    pub fn rel_gap(&self) -> f64 {
        self.abs_gap / self.oracle_value.abs().max(f64::MIN_POSITIVE)
    }
}

/// Compares a closed form against its series oracle.
pub fn lemma_sum(kind: LemmaKind, p: &HypergeometricParams) -> Result<IdentityCheck> {
    let closed_form = lemma_closed_form(kind, p)?;
    let oracle = lemma_oracle(kind, p);
    let (literal_closed_form, literal_gap) = if kind == LemmaKind::C {
        let lit = lemma_c_closed_form(p, true)?;
        (Some(lit), Some((lit - oracle.value).abs()))
    } else {
        (None, None)
    };
    Ok(IdentityCheck {
        kind,
        closed_form,
        oracle_value: oracle.value,
        abs_gap: (closed_form - oracle.value).abs(),
        terms_used: oracle.terms_used,
        slow_convergence: oracle.extrapolated || p.excess() < SLOW_CONVERGENCE,
        literal_closed_form,
        literal_gap,
    })
}

/// Random parameters for the Gauss value with `c - a - b` in `[0.5, 5]` and
/// `c`, `c - a`, `c - b` positive.
pub fn sample_gauss_params<R: Rng>(rng: &mut R) -> HypergeometricParams {
    loop {
        let a: f64 = rng.gen_range(-0.9..3.0);
        let b: f64 = rng.gen_range(-0.9..3.0);
        let c = a + b + rng.gen_range(0.5..=5.0);
        if a == 0.0 || b == 0.0 || !(c > 0.0 && c - a > 0.0 && c - b > 0.0) {
            continue;
        }
        if let Ok(p) = HypergeometricParams::new(a, b, c) {
            return p;
        }
    }
}

/// Random parameters satisfying the precondition of `kind`, with the tail
/// of the weighted series decaying at least like `K^-2`.
pub fn sample_lemma_params<R: Rng>(rng: &mut R, kind: LemmaKind) -> HypergeometricParams {
    loop {
        let a: f64 = rng.gen_range(-0.9..3.0);
        let b: f64 = rng.gen_range(-0.9..3.0);
        if a == 0.0 || b == 0.0 || (kind == LemmaKind::C && ((a - 1.0).abs() < 0.1 || (b - 1.0).abs() < 0.1)) {
            continue;
        }
        let shift = match kind {
            LemmaKind::A | LemmaKind::C => 1.0,
            LemmaKind::B => 2.0,
        };
        let c = a + b + shift + rng.gen_range(2.0..=6.0);
        if let Ok(p) = HypergeometricParams::new(a, b, c) {
            if check_lemma(kind, &p).is_ok() {
                return p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hp(a: f64, b: f64, c: f64) -> HypergeometricParams {
        HypergeometricParams::new(a, b, c).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(2.7, 0), 1.0);
        assert_eq!(pochhammer(-3.0, 2), 6.0);
        assert_eq!(pochhammer(-3.0, 2), factorial(3) / factorial(1));
        assert_eq!(pochhammer(-3.0, 4), 0.0);
        assert_eq!(binomial(6, 2), 15.0);
        assert_eq!(binomial(2, 5), 0.0);
    }

    #[test]
    fn ln_gamma_examples() {
        // reference values computed at 30 digits
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert!(rel(ln_gamma(5.0).unwrap(), 3.1780538303479456) < 1e-14);
        assert!(rel(ln_gamma(5.0).unwrap(), 24f64.ln()) < 1e-14);
        assert!(rel(ln_gamma(0.5).unwrap(), 0.5723649429247001) < 1e-14);
        assert!(rel(ln_gamma(0.1).unwrap(), 2.252712651734206) < 1e-14);
        assert!(rel(ln_gamma(2.5).unwrap(), 0.284_682_870_472_919_2) < 1e-13);
        assert!(rel(ln_gamma(170.0).unwrap(), 701.437_263_808_737) < 1e-14);
        assert!(rel(ln_gamma(1e-3).unwrap(), 6.907178885383854) < 1e-14);
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    #[test]
    fn half_integer_duplication() {
        // Gamma(1/2) Gamma(1) = 2^{1-1} sqrt(pi) Gamma(1)
        let lhs = ln_gamma(0.5).unwrap();
        assert!((lhs - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-15);
    }

    #[test]
    fn params_reject_poles() {
        assert!(HypergeometricParams::new(1.0, 1.0, 0.0).is_err());
        assert!(HypergeometricParams::new(1.0, 1.0, -2.0).is_err());
        assert!(HypergeometricParams::new(1.0, 1.0, -2.5).is_ok());
    }

    #[test]
    fn gauss_value_examples() {
        assert!((gauss_value(&hp(1.0, 1.0, 3.0)).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(gauss_value(&hp(-1.0, -1.0, 1.0)).unwrap(), 2.0);
        assert_eq!(gauss_value(&hp(0.0, 3.3, 1.7)).unwrap(), 1.0);
        assert!(matches!(gauss_value(&hp(1.0, 1.0, 2.0)), Err(Error::Divergence(_))));
        // 30-digit references
        assert!(rel(gauss_value(&hp(1.5, 0.7, 2.7)).unwrap(), 2.981896735845407) < 1e-13);
        assert!(rel(gauss_value(&hp(0.3, -0.4, 0.4)).unwrap(), 0.3549673131046302) < 1e-13);
        assert!(rel(gauss_value(&hp(2.0, 2.5, 9.0)).unwrap(), 2.2626262626262626) < 1e-13);
        assert_eq!(gauss_value(&hp(-0.5, 1.2, 1.2)).unwrap(), 0.0);
        // c - a < 0: signs come from the gamma factors
        let v = gauss_value(&hp(2.5, -3.2, 0.3)).unwrap();
        assert!(rel(v, f21_unit_sum(&hp(2.5, -3.2, 0.3)).unwrap().value) < 1e-9);
    }

    #[test]
    fn unit_sum_converges_for_slow_series() {
        let s = f21_unit_sum(&hp(1.5, 0.7, 2.7)).unwrap();
        assert!(s.extrapolated);
        assert!(rel(s.value, 2.981896735845407) < 1e-10);
        let s = f21_unit_sum(&hp(0.3, -0.4, 0.4)).unwrap();
        assert!(rel(s.value, 0.3549673131046302) < 1e-10);
        let s = f21_unit_sum(&hp(-0.5, 1.2, 1.2)).unwrap();
        assert!(s.value.abs() < 1e-9);
        let s = f21_unit_sum(&hp(2.0, 2.5, 9.0)).unwrap();
        assert!(rel(s.value, 2.2626262626262626) < 1e-12);
        assert!(f21_unit_sum(&hp(1.0, 1.0, 1.5)).is_err());
    }

    #[test]
    fn f21_truncated_examples() {
        let z0 = Complex64::new(0.0, 0.0);
        assert_eq!(f21_truncated(&hp(0.3, 2.0, 1.5), z0, 10).unwrap(), Complex64::new(1.0, 0.0));
        let z = Complex64::new(0.3, -0.7);
        let v = f21_truncated(&hp(-1.0, -1.0, 1.0), z, 10).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0) + z);
        let v = f21_truncated(&hp(1.0, 1.0, 2.0), Complex64::new(0.5, 0.0), 64).unwrap();
        assert!((v.re - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((v.re - 1.3862944).abs() < 1e-7);
        assert!(f21_truncated(&hp(1.0, 1.0, 2.0), Complex64::new(1.0, 0.0), 64).is_err());
        assert!(f21_truncated(&hp(1.0, 1.0, 2.0), Complex64::new(1.1, 0.0), 64).is_err());
    }

    #[test]
    fn terminating_series_are_polynomials() {
        for m in 0..8 {
            let p = hp(-(m as f64), 2.3, 1.7);
            let t = f21_terms(&p, m + 20);
            assert!(t[m] != 0.0);
            assert!(t[m + 1..].iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn lemma_examples() {
        let c = lemma_sum(LemmaKind::A, &hp(1.0, 1.0, 4.0)).unwrap();
        assert!((c.closed_form - 3.0).abs() < 1e-13);
        assert!(c.rel_gap() < 1e-8);
        let c = lemma_sum(LemmaKind::B, &hp(1.0, 1.0, 5.0)).unwrap();
        assert!((c.closed_form - 6.0).abs() < 1e-13);
        assert!(c.rel_gap() < 1e-8);
        let c = lemma_sum(LemmaKind::C, &hp(2.0, 2.0, 6.0)).unwrap();
        assert!((c.closed_form - 5.0 / 3.0).abs() < 1e-13);
        assert!((c.oracle_value - 5.0 / 3.0).abs() < 1e-10);
        assert!((c.literal_closed_form.unwrap() + 5.0 / 3.0).abs() < 1e-13);
        assert!((c.literal_gap.unwrap() - 10.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn lemma_against_reference_sums() {
        // 40-digit references; the series and the closed forms agree at that precision
        let cases = [
            (LemmaKind::A, hp(0.5, 1.5, 5.0), 1.707353599035342),
            (LemmaKind::B, hp(0.5, 1.5, 6.0), 2.6238550980846164),
            (LemmaKind::C, hp(0.5, 1.5, 5.0), 1.0994594993279247),
            (LemmaKind::A, hp(-0.3, 2.2, 6.1), 0.6872111269176809),
            (LemmaKind::B, hp(-0.3, 2.2, 7.1), 0.3719722735130136),
            (LemmaKind::C, hp(-0.3, 2.2, 6.1), 0.9382905446765514),
        ];
        for (kind, p, expected) in cases {
            let c = lemma_sum(kind, &p).unwrap();
            assert!(rel(c.closed_form, expected) < 1e-12, "{kind:?} closed form {} vs {expected}", c.closed_form);
            assert!(rel(c.oracle_value, expected) < 1e-10, "{kind:?} oracle");
        }
    }

    #[test]
    fn lemma_preconditions() {
        assert!(lemma_sum(LemmaKind::A, &hp(1.0, 1.0, 3.0)).is_err());
        assert!(lemma_sum(LemmaKind::B, &hp(1.0, 1.0, 4.0)).is_err());
        assert!(lemma_sum(LemmaKind::C, &hp(1.0, 2.0, 6.0)).is_err());
        assert!(lemma_sum(LemmaKind::C, &hp(2.0, 2.0, 1.0)).is_err());
        assert!((lemma_sum(LemmaKind::A, &hp(0.0, 1.0, 5.0)).unwrap().closed_form - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_check_serializes_both_variants_for_c() {
        let v = serde_json::to_value(lemma_sum(LemmaKind::C, &hp(2.0, 2.0, 6.0)).unwrap()).unwrap();
        assert!(v["literal_closed_form"].is_number());
        let v = serde_json::to_value(lemma_sum(LemmaKind::A, &hp(1.0, 1.0, 4.0)).unwrap()).unwrap();
        assert!(v.get("literal_closed_form").is_none());
    }

    #[test]
    fn random_draws_match_their_oracles() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let p = sample_gauss_params(&mut rng);
            let oracle = f21_unit_sum(&p).unwrap().value;
            assert!(rel(gauss_value(&p).unwrap(), oracle) < 1e-9, "{p:?}");
        }
        for kind in [LemmaKind::A, LemmaKind::B, LemmaKind::C] {
            for _ in 0..10 {
                let p = sample_lemma_params(&mut rng, kind);
                assert!(lemma_sum(kind, &p).unwrap().rel_gap() < 1e-8, "{kind:?} {p:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn pochhammer_recurrence(x in -20.0f64..20.0, n in 0usize..30) {
            let lhs = pochhammer(x, n + 1);
            let rhs = (x + n as f64) * pochhammer(x, n);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
        }

        #[test]
        fn pochhammer_recurrence_exact_for_integers(x in -12i32..12, n in 0usize..10) {
            let x = x as f64;
            prop_assert_eq!(pochhammer(x, n + 1), (x + n as f64) * pochhammer(x, n));
        }
    }
}
