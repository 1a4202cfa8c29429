//! Harmonic maps built from the Gauss hypergeometric series, their sufficient
//! membership conditions, and the convolution transform.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::membership::{par_map, Certificate, Method, DEFAULT_TOLERANCE};
use crate::params::ClassParams;
use crate::series::{check_unimodular, AnalyticSeries, GridSpec, HarmonicMap};
use crate::specfun::{
    binomial, gauss_value, lemma_c_closed_form, lemma_closed_form, pochhammer, sum_to_convergence,
    HypergeometricParams, LemmaKind, Terms,
};

/// Auto truncation stops once `n (n + alpha - 1) |C_n|` drops below this
/// fraction of `beta`.
pub const TAIL_FRACTION: f64 = 1e-14;
pub const MAX_AUTO_DEGREE: usize = 512;
const MIN_AUTO_DEGREE: usize = 4;

/// The three co-analytic parts `z^2 F`, `z (F - 1)` and `z int_0^z F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    F1,
    F2,
    F3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::F1, Family::F2, Family::F3];

    /// Power of `z` carrying the series term `t_k`.
    fn power(self, k: usize) -> usize {
        match self {
            Family::F2 => k + 1,
            Family::F1 | Family::F3 => k + 2,
        }
    }

    /// Coefficient at power `power(k)` given the series term `t_k`.
    fn coefficient(self, k: usize, t: f64) -> f64 {
        match self {
            Family::F2 if k == 0 => 0.0,
            Family::F3 => t / (k + 1) as f64,
            _ => t,
        }
    }

    pub fn condition_kind(self) -> ConditionKind {
        match self {
            Family::F1 => ConditionKind::A,
            Family::F2 => ConditionKind::B,
            Family::F3 => ConditionKind::C,
        }
    }

    /// Exponent of the tail `sum_{n > K} n (n+alpha-1) |C_n| ~ K^-p`.
    fn tail_exponent(self, p: &HypergeometricParams) -> f64 {
        match self {
            Family::F1 | Family::F2 => p.excess() - 2.0,
            Family::F3 => p.excess() - 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionKind {
    Hyper(Family),
    Poly(Family),
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 6] = [
        ConstructionKind::Hyper(Family::F1),
        ConstructionKind::Hyper(Family::F2),
        ConstructionKind::Hyper(Family::F3),
        ConstructionKind::Poly(Family::F1),
        ConstructionKind::Poly(Family::F2),
        ConstructionKind::Poly(Family::F3),
    ];

    pub fn family(self) -> Family {
        match self {
            ConstructionKind::Hyper(f) | ConstructionKind::Poly(f) => f,
        }
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (prefix, index) = match self {
            ConstructionKind::Hyper(fam) => ("hyper_f", fam),
            ConstructionKind::Poly(fam) => ("poly_F", fam),
        };
        let index = match index {
            Family::F1 => 1,
            Family::F2 => 2,
            Family::F3 => 3,
        };
        write!(f, "{prefix}{index}")
    }
}

impl FromStr for ConstructionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstructionKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .map_or_else(|| domain(format!("unknown construction kind `{s}`")), Ok)
    }
}

impl Serialize for ConstructionKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConstructionKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    A,
    B,
    C,
}

impl ConditionKind {
    pub fn family(self) -> Family {
        match self {
            ConditionKind::A => Family::F1,
            ConditionKind::B => Family::F2,
            ConditionKind::C => Family::F3,
        }
    }
}

impl FromStr for ConditionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "c" => Ok(Self::C),
            other => domain(format!("unknown condition kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    pub params: HypergeometricParams,
    /// Polynomial kinds only; `a = b = -m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub class_params: ClassParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

impl ConstructionSpec {
    pub fn hyper(family: Family, params: HypergeometricParams, class_params: ClassParams) -> Self {
        Self { kind: ConstructionKind::Hyper(family), params, m: None, class_params, truncation: None }
    }

    pub fn poly(family: Family, m: u32, c: f64, class_params: ClassParams) -> Result<Self> {
        if m == 0 {
            return domain("polynomial constructions need m >= 1");
        }
        if !(c > 0.0) {
            return domain(format!("polynomial constructions need c > 0, got {c}"));
        }
        let a = -(m as f64);
        Ok(Self {
            kind: ConstructionKind::Poly(family),
            params: HypergeometricParams::new(a, a, c)?,
            m: Some(m),
            class_params,
            truncation: None,
        })
    }

    pub fn with_truncation(mut self, degree: usize) -> Self {
        self.truncation = Some(degree);
        self
    }

    fn validate(&self) -> Result<()> {
        if let ConstructionKind::Poly(_) = self.kind {
            let m = match self.m {
                Some(m) if m >= 1 => m as f64,
                _ => return domain("polynomial constructions need m >= 1"),
            };
            if self.params.a() != -m || self.params.b() != -m {
                return domain("polynomial constructions force a = b = -m");
            }
        }
        Ok(())
    }
}

/// Coefficients of the polynomial kinds: `binom(m, k) (m-k+1)_k / (c)_k`.
fn poly_term(m: usize, c: f64, k: usize) -> f64 {
    if k > m {
        return 0.0;
    }
    binomial(m, k) * pochhammer((m - k + 1) as f64, k) / pochhammer(c, k)
}

fn weight(n: usize, alpha: f64) -> f64 {
    let n = n as f64;
    n * (n + alpha - 1.0)
}

/// Degree needed for the co-analytic part under `spec`.
fn truncation_degree(spec: &ConstructionSpec) -> Result<usize> {
    let family = spec.kind.family();
    if let Some(m) = spec.params.terminating_degree() {
        let needed = family.power(m).max(2);
        return match spec.truncation {
            Some(t) if t < needed => domain(format!("truncation {t} is below the polynomial degree {needed}")),
            Some(t) => Ok(t),
            None => Ok(needed),
        };
    }
    if let Some(t) = spec.truncation {
        if t < 2 {
            return domain("truncation must be at least 2");
        }
        return Ok(t);
    }
    let cp = &spec.class_params;
    let cutoff = TAIL_FRACTION * cp.beta();
    for (k, t) in Terms::new(spec.params).enumerate() {
        let n = family.power(k);
        if n >= MAX_AUTO_DEGREE {
            return Ok(MAX_AUTO_DEGREE);
        }
        let term = weight(n, cp.alpha()) * family.coefficient(k, t).abs();
        if n >= MIN_AUTO_DEGREE && term < cutoff {
            return Ok(n);
        }
    }
    unreachable!("series term iterator is infinite")
}

/// Builds `z + conj(g)` with `g` from the hypergeometric series.
pub fn build(spec: &ConstructionSpec) -> Result<HarmonicMap> {
    spec.validate()?;
    let degree = truncation_degree(spec)?;
    let family = spec.kind.family();
    let mut g = vec![Complex64::new(0.0, 0.0); degree + 1];
    let terms: Box<dyn Iterator<Item = f64>> = match (spec.kind, spec.m) {
        (ConstructionKind::Poly(_), Some(m)) => {
            let c = spec.params.c();
            Box::new((0..).map(move |k| poly_term(m as usize, c, k)))
        }
        _ => Box::new(Terms::new(spec.params)),
    };
    for (k, t) in terms.enumerate() {
        let n = family.power(k);
        if n > degree {
            break;
        }
        g[n] = Complex64::new(family.coefficient(k, t), 0.0);
    }
    HarmonicMap::new(AnalyticSeries::identity(degree), AnalyticSeries::new(g)?)
}

/// `sum_{n>=2} n (n+alpha-1) |C_n|` over the full series, by direct
/// summation to convergence.
pub fn full_coefficient_sum(family: Family, p: &HypergeometricParams, alpha: f64) -> crate::specfun::SeriesSum {
    let values =
        Terms::new(*p).enumerate().map(move |(k, t)| weight(family.power(k), alpha) * family.coefficient(k, t).abs());
    sum_to_convergence(values, p.terminating_degree(), family.tail_exponent(p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    /// Right-hand side minus left-hand side of the sufficient condition.
    pub margin: f64,
    /// The same with the condition exactly as printed in the source result.
    pub printed_margin: f64,
    /// `beta - sum n (n+alpha-1) |C_n|` over the full series.
    pub coefficient_margin_crosscheck: f64,
    /// Gauss value `F(a, b; c; 1)`.
    pub lambda: f64,
    pub truncation_degree: usize,
    /// Part of the coefficient sum beyond the stored degree.
    pub dropped_tail_bound: f64,
    pub slow_convergence: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConditionReport {
    /// The sufficient condition holds and the crosscheck agrees.
    pub fn consistent(&self, tolerance: f64) -> bool {
        self.margin < 0.0 || self.coefficient_margin_crosscheck >= -tolerance
    }
}

fn check_condition(kind: ConditionKind, p: &HypergeometricParams, cp: &ClassParams) -> Result<()> {
    let (a, b, c) = (p.a(), p.b(), p.c());
    if !(c > 0.0) {
        return domain(format!("the conditions need c > 0, got {c}"));
    }
    match kind {
        ConditionKind::A | ConditionKind::B if !(c > a + b + 2.0) => {
            domain(format!("condition ({kind:?}) needs c > a + b + 2, got c - a - b = {}", p.excess()))
        }
        ConditionKind::B if !(cp.beta() > cp.alpha()) => {
            domain(format!("condition (b) needs beta > alpha, got alpha = {}, beta = {}", cp.alpha(), cp.beta()))
        }
        ConditionKind::C if a == 1.0 || b == 1.0 || c == 1.0 || !(c > (a + b + 1.0).max(0.0)) => {
            domain("condition (c) needs a, b, c != 1 and c > max(0, a + b + 1)")
        }
        _ => Ok(()),
    }
}

/// Left-hand sides (corrected, printed) of the sufficient conditions, in the
/// units of their printed right-hand sides.
fn condition_sides(kind: ConditionKind, p: &HypergeometricParams, cp: &ClassParams, lambda: f64) -> Result<(f64, f64)> {
    let (a, b, c) = (p.a(), p.b(), p.c());
    let alpha = cp.alpha();
    let q = p.excess() - 1.0;
    let poch2 = (q - 1.0) * q;
    Ok(match kind {
        ConditionKind::A => {
            let lhs = pochhammer(a, 2) * pochhammer(b, 2) / poch2 + a * b * (alpha + 4.0) / q + 2.0 * (1.0 + alpha);
            (lhs, lhs)
        }
        ConditionKind::B => {
            let lhs = a * b * (a * b + c - 1.0) / poch2 + a * b * (1.0 + alpha) / q + alpha;
            (lhs, lhs)
        }
        ConditionKind::C => {
            let s_a = lemma_closed_form(LemmaKind::A, p)?;
            let s_c = lemma_closed_form(LemmaKind::C, p)?;
            let lhs = s_a + (1.0 + alpha) * lambda + alpha * s_c;
            let ab1 = (a - 1.0) * (b - 1.0);
            let printed = lambda * (a * b / q + alpha / (ab1 * q) + alpha) - alpha * (c - 1.0) / ab1;
            (lhs, printed)
        }
    })
}

/// Evaluates the sufficient condition of the given kind for `p` and checks it
/// against the coefficient sum of the full series.
///
/// * (a): `LHS <= beta / Lambda`; the coefficient sum equals `Lambda * LHS`.
/// * (b): the coefficient sum equals `Lambda * LHS - alpha`, so the margin is
///   `(beta + alpha) / Lambda - LHS`; the printed `(beta - alpha) / Lambda`
///   form goes to `printed_margin`.
/// * (c): the left side is assembled from the weighted sums, `margin = beta - LHS`;
///   the printed form lacks `2 Lambda` and uses the shifted gamma argument.
pub fn condition_margin(kind: ConditionKind, p: &HypergeometricParams, cp: &ClassParams) -> Result<ConditionReport> {
    check_condition(kind, p, cp)?;
    let family = kind.family();
    let lambda = gauss_value(p)?;
    let (lhs, printed_lhs) = condition_sides(kind, p, cp, lambda)?;
    let (beta, alpha) = (cp.beta(), cp.alpha());
    let (margin, printed_margin) = match kind {
        ConditionKind::A => (beta / lambda - lhs, beta / lambda - printed_lhs),
        ConditionKind::B => ((beta + alpha) / lambda - lhs, (beta - alpha) / lambda - printed_lhs),
        ConditionKind::C => (beta - lhs, beta - printed_lhs),
    };
    let spec = ConstructionSpec::hyper(family, *p, *cp);
    let map = build(&spec)?;
    let truncated = crate::membership::coefficient_sum(&map, alpha);
    let full = full_coefficient_sum(family, p, alpha);
    let mut notes = Vec::new();
    if kind == ConditionKind::C {
        let literal = lemma_c_closed_form(p, true)?;
        notes.push(format!(
            "printed form evaluated with the shifted gamma argument (weighted sum {literal} instead of {})",
            lemma_closed_form(LemmaKind::C, p)?
        ));
    }
    if kind == ConditionKind::B && alpha < 0.0 {
        notes.push("alpha < 0: the printed (beta - alpha) form is weaker than the coefficient condition".into());
    }
    if Terms::new(*p).take(64).any(|t| t < 0.0) {
        notes.push("series terms change sign; the closed forms bound the signed sum only".into());
    }
    Ok(ConditionReport {
        kind,
        margin,
        printed_margin,
        coefficient_margin_crosscheck: beta - full.value,
        lambda,
        truncation_degree: map.degree(),
        dropped_tail_bound: (full.value - truncated).max(0.0),
        slow_convergence: full.extrapolated,
        notes,
    })
}

/// Condition report for a construction spec; polynomial kinds substitute `a = b = -m`.
pub fn spec_condition(spec: &ConstructionSpec) -> Result<ConditionReport> {
    spec.validate()?;
    condition_margin(spec.kind.family().condition_kind(), &spec.params, &spec.class_params)
}

/// Coefficient sum of the full series next to its closed form
/// (`Lambda * LHS`, minus `alpha` for F2).
pub fn coefficient_sum_identity(family: Family, p: &HypergeometricParams, cp: &ClassParams) -> Result<(f64, f64)> {
    let kind = family.condition_kind();
    let lambda = gauss_value(p)?;
    let (lhs, _) = condition_sides(kind, p, cp, lambda)?;
    let closed = match kind {
        ConditionKind::A => lambda * lhs,
        ConditionKind::B => lambda * lhs - cp.alpha(),
        ConditionKind::C => lhs,
    };
    let sum = full_coefficient_sum(family, p, cp.alpha()).value;
    Ok((sum, closed))
}

/// Random hypergeometric parameters satisfying the preconditions of `kind`,
/// with positive series terms.
///
/// `a, b` are drawn from `(0.05, 3)`, or as a common negative non-integer value
/// one time in four; the tail exponent of the coefficient sum lies in `[1, 5]`.
pub fn sample_condition_params<R: Rng>(rng: &mut R, kind: ConditionKind) -> HypergeometricParams {
    loop {
        let (a, b) = if rng.gen_bool(0.25) {
            let a: f64 = -rng.gen_range(0.05..2.95);
            (a, a)
        } else {
            (rng.gen_range(0.05..3.0f64), rng.gen_range(0.05..3.0f64))
        };
        let excess = match kind {
            ConditionKind::A | ConditionKind::B => 3.0,
            ConditionKind::C => 2.0,
        } + rng.gen_range(0.0..4.0);
        let c = a + b + excess;
        if a.fract() == 0.0 || (a - 1.0).abs() < 0.05 || (b - 1.0).abs() < 0.05 || !(c > 0.05) {
            continue;
        }
        if let Ok(p) = HypergeometricParams::new(a, b, c) {
            return p;
        }
    }
}

/// Draws `beta` around the coefficient sum so both outcomes of the condition occur.
pub fn sample_condition_class<R: Rng>(rng: &mut R, kind: ConditionKind, p: &HypergeometricParams) -> ClassParams {
    loop {
        let alpha = rng.gen_range(-0.9..3.0);
        let sum = full_coefficient_sum(kind.family(), p, alpha).value;
        let beta = sum * rng.gen_range(0.5..1.5);
        // condition (b) also needs beta > alpha
        if kind == ConditionKind::B && !(beta > alpha) {
            continue;
        }
        if let Ok(cp) = ClassParams::new(alpha, beta) {
            return cp;
        }
    }
}

/// Convex test functions for the convolution transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexCatalog {
    /// `z / (1 - z)`
    HalfPlane,
    /// `-log(1 - z)`
    LogMap,
}

impl FromStr for ConvexCatalog {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half_plane" => Ok(Self::HalfPlane),
            "log_map" => Ok(Self::LogMap),
            other => domain(format!("unknown catalog function `{other}`")),
        }
    }
}

/// Truncation of a catalog function to degree `n`.
pub fn convex_catalog(name: ConvexCatalog, n: usize) -> Result<AnalyticSeries> {
    if n < 2 {
        return domain("catalog truncation needs N >= 2");
    }
    Ok(AnalyticSeries::from_fn(n, |k| {
        let v = match (k, name) {
            (0, _) => 0.0,
            (_, ConvexCatalog::HalfPlane) => 1.0,
            (_, ConvexCatalog::LogMap) => 1.0 / k as f64,
        };
        Complex64::new(v, 0.0)
    }))
}

/// `margin = min over the grid of Re(phi(z)/z) - 1/2`.
pub fn herglotz_check(phi: &AnalyticSeries, grid: &GridSpec) -> Certificate {
    herglotz_check_with(phi, grid, DEFAULT_TOLERANCE)
}

pub fn herglotz_check_with(phi: &AnalyticSeries, grid: &GridSpec, tolerance: f64) -> Certificate {
    // phi(z)/z has coefficients shifted down by one
    let quotient = AnalyticSeries::from_fn(phi.degree().saturating_sub(1), |k| phi.coeff(k + 1));
    let values = par_map(&grid.points(), |&z| quotient.horner(z).re - 0.5);
    let margin = values.into_iter().fold(f64::INFINITY, f64::min);
    Certificate::new(Method::Herglotz, margin, tolerance, Some(grid)).with_degree(phi.degree())
}

/// `f * (phi + lambda conj(phi)) = h * phi + conj(conj(lambda) (g * phi))`.
pub fn convolution_transform(f: &HarmonicMap, phi: &AnalyticSeries, lambda: Complex64) -> Result<HarmonicMap> {
    check_unimodular(lambda)?;
    if !phi.is_normalized() {
        return domain("phi must satisfy phi(0) = 0 and phi'(0) = 1");
    }
    let g = f.g().hadamard(phi).scale(lambda.conj());
    HarmonicMap::new(f.h().hadamard(phi), g)
}

/// Convolution transform gated on the Herglotz condition for `phi`.
pub fn certified_convolution(
    f: &HarmonicMap,
    phi: &AnalyticSeries,
    lambda: Complex64,
    grid: &GridSpec,
) -> Result<(HarmonicMap, Certificate)> {
    let cert = herglotz_check(phi, grid);
    if !cert.passed {
        return domain(format!("phi fails the Herglotz condition (margin {})", cert.margin));
    }
    Ok((convolution_transform(f, phi, lambda)?, cert))
}
