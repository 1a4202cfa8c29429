//! Truncated complex power series and the harmonic-map data model.
//!
//! A series stores its coefficients `c_0..c_N` explicitly, and every
//! operation keeps the truncation degree `N` visible: nothing is ever
//! silently extended. Binary operations on mixed degrees zero-pad to the
//! larger degree, except [`AnalyticSeries::hadamard`], which truncates to the
//! smaller one because the product coefficients beyond it are unknown.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::params::ClassParams;

/// Default truncation degree for constructed series.
pub const DEFAULT_TRUNCATION: usize = 64;

/// Slack allowed on `|z| <= 1` so that points computed as `e^{i theta}` are accepted.
pub(crate) const UNIT_SLACK: f64 = 1e-12;

/// Unimodularity tolerance for rotation parameters.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Truncated power series `c_0 + c_1 z + ... + c_N z^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct AnalyticSeries {
    coeffs: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for AnalyticSeries {
    type Error = crate::Error;

    fn try_from(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(coeffs)
    }
}

impl From<AnalyticSeries> for Vec<Complex64> {
    fn from(s: AnalyticSeries) -> Self {
        s.coeffs
    }
}

impl AnalyticSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return domain("a series needs at least one coefficient");
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return domain("series coefficients must be finite");
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); degree + 1] }
    }

    /// The identity map `z`, truncated at `degree` (at least 1).
    pub fn identity(degree: usize) -> Self {
        let mut s = Self::zero(degree.max(1));
        s.coeffs[1] = Complex64::new(1.0, 0.0);
        s
    }

    /// Builds a series of the given degree from a coefficient function.
    pub fn from_fn(degree: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self { coeffs: (0..=degree).map(f).collect() }
    }

    /// Truncation degree `N`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the last non-zero coefficient (0 for the zero series).
    pub fn effective_degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| c.re != 0.0 || c.im != 0.0).unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^n`; zero beyond the truncation degree.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// `c_0 = 0` and `c_1 = 1` exactly.
    pub fn is_normalized(&self) -> bool {
        self.coeff(0) == Complex64::new(0.0, 0.0) && self.coeff(1) == Complex64::new(1.0, 0.0)
    }

    /// Copy with degree changed to `degree`, zero-padding or dropping terms.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// Horner evaluation at a point of the closed unit disk.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_closed_disk(z)?;
        Ok(self.horner(z))
    }

    pub(crate) fn horner(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// First or second derivative; the result has degree `N - order`.
    pub fn differentiate(&self, order: u32) -> Result<Self> {
        if !(1..=2).contains(&order) {
            return domain(format!("derivative order must be 1 or 2, got {order}"));
        }
        let order = order as usize;
        if self.degree() < order {
            return domain(format!("degree {} series has no order-{order} derivative coefficients", self.degree()));
        }
        let coeffs = (order..=self.degree())
            .map(|n| {
                let falling = (n + 1 - order..=n).product::<usize>() as f64;
                self.coeffs[n] * falling
            })
            .collect();
        Ok(Self { coeffs })
    }

    /// The series of `z s''(z) + alpha s'(z)`, i.e. coefficients
    /// `n (n - 1 + alpha) c_n` at power `n - 1`. Defined for any degree.
    pub fn class_operator(&self, alpha: f64) -> Self {
        let degree = self.degree().max(1);
        let coeffs = (1..=degree).map(|n| self.coeff(n) * (n as f64 * (n as f64 - 1.0 + alpha))).collect();
        Self { coeffs }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    /// Coefficient-wise sum, zero-padded to the larger degree.
    pub fn add(&self, other: &Self) -> Self {
        let degree = self.degree().max(other.degree());
        Self::from_fn(degree, |n| self.coeff(n) + other.coeff(n))
    }

    /// Term-wise coefficient product, truncated to the smaller degree.
    pub fn hadamard(&self, other: &Self) -> Self {
        let degree = self.degree().min(other.degree());
        Self::from_fn(degree, |n| self.coeffs[n] * other.coeffs[n])
    }
}

/// Returns an error if `|z| > 1` (with a rounding slack of `1e-12`).
pub(crate) fn check_closed_disk(z: Complex64) -> Result<()> {
    let r = z.norm();
    if !(r <= 1.0 + UNIT_SLACK) {
        return domain(format!("|z| = {r} lies outside the closed unit disk"));
    }
    Ok(())
}

pub(crate) fn check_unimodular(lambda: Complex64) -> Result<()> {
    if !((lambda.norm() - 1.0).abs() <= UNIMODULAR_TOL) {
        return domain(format!("rotation parameter must satisfy |lambda| = 1, got |lambda| = {}", lambda.norm()));
    }
    Ok(())
}

/// Harmonic map `f = h + conj(g)` in the class H: `h(0) = 0`, `h'(0) = 1`, `g(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap")]
pub struct HarmonicMap {
    h: AnalyticSeries,
    g: AnalyticSeries,
}

#[derive(Deserialize)]
struct RawMap {
    h: AnalyticSeries,
    g: AnalyticSeries,
}

impl TryFrom<RawMap> for HarmonicMap {
    type Error = crate::Error;

    fn try_from(raw: RawMap) -> Result<Self> {
        Self::new(raw.h, raw.g)
    }
}

impl HarmonicMap {
    /// Validates the class-H normalization and pads both parts to a common degree.
    pub fn new(h: AnalyticSeries, g: AnalyticSeries) -> Result<Self> {
        if !h.is_normalized() {
            return domain("analytic part must satisfy h(0) = 0 and h'(0) = 1 exactly");
        }
        if g.coeff(0) != Complex64::new(0.0, 0.0) {
            return domain("co-analytic part must satisfy g(0) = 0");
        }
        let degree = h.degree().max(g.degree());
        Ok(Self { h: h.with_degree(degree), g: g.with_degree(degree) })
    }

    /// `f = h` with vanishing co-analytic part.
    pub fn analytic(h: AnalyticSeries) -> Result<Self> {
        let g = AnalyticSeries::zero(h.degree());
        Self::new(h, g)
    }

    pub fn identity(degree: usize) -> Self {
        Self { h: AnalyticSeries::identity(degree), g: AnalyticSeries::zero(degree.max(1)) }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series serialize to JSON")
    }

    pub fn h(&self) -> &AnalyticSeries {
        &self.h
    }

    pub fn g(&self) -> &AnalyticSeries {
        &self.g
    }

    pub fn degree(&self) -> usize {
        self.h.degree()
    }

    /// Class H⁰ additionally requires `g'(0) = 0`.
    pub fn is_h0(&self) -> bool {
        self.g.coeff(1) == Complex64::new(0.0, 0.0)
    }

    /// Replaces `g` by `lambda g`.
    pub fn rotate_coanalytic(&self, lambda: Complex64) -> Self {
        Self { h: self.h.clone(), g: self.g.scale(lambda) }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_closed_disk(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.h.horner(z) + self.g.horner(z).conj()
    }

    /// `|z h'' + alpha (h' - 1)| + |z g'' + alpha g'|`.
    pub fn defect(&self, params: &ClassParams, z: Complex64) -> f64 {
        DefectTerms::new(self, params.alpha()).defect(z)
    }

    /// `|h'(z)|^2 - |g'(z)|^2`.
    pub fn jacobian(&self, z: Complex64) -> f64 {
        DerivativeParts::new(self).jacobian(z)
    }

    /// The analytic function `F_lambda = h + lambda g`.
    pub fn analytic_slice(&self, lambda: Complex64) -> Result<AnalyticSeries> {
        check_unimodular(lambda)?;
        Ok(self.h.add(&self.g.scale(lambda)))
    }
}

/// Precomputed operator series for repeated defect evaluation:
/// `A(z) = z h'' + alpha (h' - 1)` and `B(z) = z g'' + alpha g'`.
#[derive(Clone, Debug)]
pub struct DefectTerms {
    a: AnalyticSeries,
    b: AnalyticSeries,
}

impl DefectTerms {
    pub fn new(f: &HarmonicMap, alpha: f64) -> Self {
        let mut a = f.h.class_operator(alpha);
        // n = 1 contributes exactly alpha * h'(0) = alpha; cancel it term-wise.
        a.coeffs[0] -= Complex64::new(alpha, 0.0);
        Self { a, b: f.g.class_operator(alpha) }
    }

    pub fn terms(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.a.horner(z), self.b.horner(z))
    }

    pub fn defect(&self, z: Complex64) -> f64 {
        let (a, b) = self.terms(z);
        a.norm() + b.norm()
    }
}

/// `h'` and `g'` of a map, for Jacobians and slice derivatives.
#[derive(Clone, Debug)]
pub struct DerivativeParts {
    dh: AnalyticSeries,
    dg: AnalyticSeries,
}

impl DerivativeParts {
    pub fn new(f: &HarmonicMap) -> Self {
        // Degree is at least 1, so first derivatives always exist.
        Self { dh: f.h.differentiate(1).expect("degree >= 1"), dg: f.g.differentiate(1).expect("degree >= 1") }
    }

    pub fn at(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.dh.horner(z), self.dg.horner(z))
    }

    pub fn jacobian(&self, z: Complex64) -> f64 {
        let (dh, dg) = self.at(z);
        dh.norm_sqr() - dg.norm_sqr()
    }
}

/// Coefficient-wise weighted sum of maps with convex weights.
pub fn convex_combination(maps: &[HarmonicMap], weights: &[f64]) -> Result<HarmonicMap> {
    if maps.is_empty() || maps.len() != weights.len() {
        return domain("need one weight per map and at least one map");
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return domain("convex weights must be nonnegative");
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return domain(format!("convex weights must sum to 1, got {total}"));
    }
    let degree = maps[0].degree();
    if maps.iter().any(|m| m.degree() != degree) {
        return domain("all maps must share the same truncation degree");
    }
    let mut h = AnalyticSeries::zero(degree);
    let mut g = AnalyticSeries::zero(degree);
    for (m, &w) in maps.iter().zip(weights) {
        for n in 0..=degree {
            h.coeffs[n] += m.h.coeffs[n] * w;
            g.coeffs[n] += m.g.coeffs[n] * w;
        }
    }
    // The weights sum to 1 only up to rounding; the normalization is exact.
    h.coeffs[1] = Complex64::new(1.0, 0.0);
    HarmonicMap::new(h, g)
}

/// Sampling plan of the disk: concentric circles with equally spaced angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridSpec {
    radii: Vec<f64>,
    angles_per_circle: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    radii: Vec<f64>,
    angles_per_circle: usize,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = crate::Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        Self::new(raw.radii, raw.angles_per_circle)
    }
}

impl Default for GridSpec {
    /// Radii `0.1, ..., 0.9, 0.99, 0.999` with 512 angles per circle.
    fn default() -> Self {
        let mut radii: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        radii.extend([0.99, 0.999]);
        Self { radii, angles_per_circle: 512 }
    }
}

impl GridSpec {
    pub fn new(radii: Vec<f64>, angles_per_circle: usize) -> Result<Self> {
        if radii.is_empty() {
            return domain("grid needs at least one radius");
        }
        if radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return domain("grid radii must lie in (0, 1)");
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return domain("grid radii must be strictly increasing");
        }
        if angles_per_circle < 8 {
            return domain("grid needs at least 8 angles per circle");
        }
        Ok(Self { radii, angles_per_circle })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles_per_circle(&self) -> usize {
        self.angles_per_circle
    }

    pub fn max_radius(&self) -> f64 {
        *self.radii.last().expect("non-empty")
    }

    /// Sub-grid keeping only radii `<= max_radius`; `None` if nothing remains.
    pub fn restricted(&self, max_radius: f64) -> Option<Self> {
        let radii: Vec<f64> = self.radii.iter().copied().filter(|&r| r <= max_radius).collect();
        (!radii.is_empty()).then_some(Self { radii, angles_per_circle: self.angles_per_circle })
    }

    /// All sample points, circle by circle, angles ascending from 0.
    pub fn points(&self) -> Vec<Complex64> {
        let m = self.angles_per_circle;
        let unit: Vec<Complex64> = (0..m)
            .map(|k| {
                let (s, c) = (std::f64::consts::TAU * k as f64 / m as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        self.radii.iter().flat_map(|&r| unit.iter().map(move |u| u * r)).collect()
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles_per_circle
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn theta01() -> HarmonicMap {
        let h = AnalyticSeries::from_real(&[0.0, 1.0, 0.25]).unwrap();
        let g = AnalyticSeries::from_real(&[0.0, 0.0, -0.25]).unwrap();
        HarmonicMap::new(h, g).unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = AnalyticSeries::identity(1);
        assert_eq!(id.eval(c(0.3, 0.0)).unwrap(), c(0.3, 0.0));
        let s = AnalyticSeries::from_real(&[0.0, 1.0, 0.25]).unwrap();
        assert_eq!(s.eval(c(1.0, 0.0)).unwrap(), c(1.25, 0.0));
        // sum z^n / (n + 1) = -ln(1 - z) / z
        let s = AnalyticSeries::from_fn(64, |n| c(1.0 / (n as f64 + 1.0), 0.0));
        let expected = -(0.5f64).ln() / 0.5;
        assert!((s.eval(c(0.5, 0.0)).unwrap().re - expected).abs() < 1e-15);
        assert!((expected - 1.3862944).abs() < 1e-7);
    }

    #[test]
    fn eval_rejects_outside_disk() {
        let s = AnalyticSeries::identity(3);
        assert!(s.eval(c(1.0, 0.1)).is_err());
        assert!(s.eval(Complex64::from_polar(1.0, 0.7)).is_ok());
    }

    #[test]
    fn differentiate_examples() {
        let s = AnalyticSeries::from_real(&[0.0, 1.0, 0.25]).unwrap();
        assert_eq!(s.differentiate(1).unwrap(), AnalyticSeries::from_real(&[1.0, 0.5]).unwrap());
        let cube = AnalyticSeries::from_real(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(cube.differentiate(2).unwrap(), AnalyticSeries::from_real(&[0.0, 6.0]).unwrap());
        assert_eq!(AnalyticSeries::identity(1).differentiate(1).unwrap(), AnalyticSeries::from_real(&[1.0]).unwrap());
        assert!(AnalyticSeries::identity(1).differentiate(2).is_err());
        assert!(cube.differentiate(3).is_err());
    }

    #[test]
    fn class_operator_matches_derivatives() {
        let s = AnalyticSeries::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, -0.2), c(-0.1, 0.05)]).unwrap();
        let alpha = 0.7;
        let d1 = s.differentiate(1).unwrap();
        let d2 = s.differentiate(2).unwrap();
        let z = c(0.3, 0.4);
        let direct = z * d2.horner(z) + d1.horner(z) * alpha;
        assert!((s.class_operator(alpha).horner(z) - direct).norm() < 1e-15);
    }

    #[test]
    fn eval_harmonic_examples() {
        let h = AnalyticSeries::from_real(&[0.0, 1.0, 0.5]).unwrap();
        let f = HarmonicMap::analytic(h.clone()).unwrap();
        let z = c(0.2, -0.6);
        assert_eq!(f.eval(z).unwrap(), h.eval(z).unwrap());
        let t = theta01();
        assert_eq!(t.eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(t.eval(c(0.5, 0.0)).unwrap(), c(0.5, 0.0));
    }

    #[test]
    fn defect_examples() {
        let p = ClassParams::new(0.0, 1.0).unwrap();
        let id = HarmonicMap::identity(4);
        assert_eq!(id.defect(&p, c(0.3, 0.8)), 0.0);
        let t = theta01();
        for &r in &[0.1, 0.5, 0.9] {
            let z = Complex64::from_polar(r, 1.1);
            assert!((t.defect(&p, z) - r).abs() < 1e-15);
        }
        let p = ClassParams::new(1.5, 0.8).unwrap();
        let k = 0.8 / (2.0 * 2.5);
        let f1 = HarmonicMap::analytic(AnalyticSeries::from_real(&[0.0, 1.0, k]).unwrap()).unwrap();
        let z = Complex64::from_polar(0.6, -2.0);
        assert!((f1.defect(&p, z) - 0.8 * 0.6).abs() < 1e-15);
    }

    #[test]
    fn jacobian_examples() {
        let t = theta01();
        assert_eq!(t.jacobian(c(0.0, 0.0)), 1.0);
        assert!((t.jacobian(c(0.5, 0.0)) - 1.5).abs() < 1e-15);
        assert!((t.jacobian(c(-0.5, 0.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn analytic_slice_examples() {
        let h = AnalyticSeries::from_real(&[0.0, 1.0, 0.5]).unwrap();
        let f = HarmonicMap::analytic(h.clone()).unwrap();
        assert_eq!(f.analytic_slice(Complex64::from_polar(1.0, 2.0)).unwrap(), h);
        let t = theta01();
        assert_eq!(t.analytic_slice(c(1.0, 0.0)).unwrap(), AnalyticSeries::from_real(&[0.0, 1.0, 0.0]).unwrap());
        assert_eq!(t.analytic_slice(c(-1.0, 0.0)).unwrap(), AnalyticSeries::from_real(&[0.0, 1.0, 0.5]).unwrap());
        assert!(t.analytic_slice(c(0.9, 0.0)).is_err());
    }

    #[test]
    fn hadamard_examples() {
        let (a, b) = (0.3, -1.7);
        let s1 = AnalyticSeries::from_real(&[0.0, 1.0, a]).unwrap();
        let s2 = AnalyticSeries::from_real(&[0.0, 1.0, b]).unwrap();
        assert_eq!(s1.hadamard(&s2), AnalyticSeries::from_real(&[0.0, 1.0, a * b]).unwrap());
        let ones = AnalyticSeries::from_fn(5, |_| c(1.0, 0.0));
        let s =
            AnalyticSeries::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.1), c(-0.3, 0.0), c(0.0, 0.4), c(0.01, 0.0)])
                .unwrap();
        assert_eq!(s.hadamard(&ones), s);
        let log = AnalyticSeries::from_fn(5, |n| if n == 0 { c(0.0, 0.0) } else { c(1.0 / n as f64, 0.0) });
        let conv = s.hadamard(&log);
        for n in 1..=5 {
            assert!((conv.coeff(n) - s.coeff(n) / n as f64).norm() < 1e-16);
        }
        // truncates to the smaller degree
        assert_eq!(s.hadamard(&AnalyticSeries::identity(2)).degree(), 2);
    }

    #[test]
    fn convex_combination_examples() {
        let t = theta01();
        assert_eq!(convex_combination(std::slice::from_ref(&t), &[1.0]).unwrap(), t);
        assert_eq!(convex_combination(&[t.clone(), t.clone()], &[0.5, 0.5]).unwrap(), t);
        let mix = convex_combination(&[t.clone(), HarmonicMap::identity(2)], &[0.5, 0.5]).unwrap();
        assert_eq!(mix.h().coeff(2), c(0.125, 0.0));
        assert_eq!(mix.g().coeff(2), c(-0.125, 0.0));
        let p = ClassParams::new(0.0, 1.0).unwrap();
        let sum: f64 =
            (2..=2).map(|n| (n * (n - 1)) as f64 * (mix.h().coeff(n).norm() + mix.g().coeff(n).norm())).sum();
        assert_eq!(sum, 0.5);
        assert!(p.beta() > sum);
        assert!(convex_combination(std::slice::from_ref(&t), &[0.9]).is_err());
        assert!(convex_combination(&[t.clone(), t.clone()], &[1.5, -0.5]).is_err());
        assert!(convex_combination(&[t.clone(), HarmonicMap::identity(5)], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn map_normalization_is_validated() {
        let bad = AnalyticSeries::from_real(&[0.0, 2.0]).unwrap();
        assert!(HarmonicMap::analytic(bad).is_err());
        let h = AnalyticSeries::identity(2);
        let g = AnalyticSeries::from_real(&[0.1, 0.0]).unwrap();
        assert!(HarmonicMap::new(h.clone(), g).is_err());
        let g = AnalyticSeries::from_real(&[0.0, 0.3, 0.0, 0.0, 0.1]).unwrap();
        let f = HarmonicMap::new(h, g).unwrap();
        assert_eq!(f.h().degree(), 4);
        assert!(!f.is_h0());
    }

    #[test]
    fn json_round_trip() {
        let t = theta01();
        let text = t.to_json();
        assert_eq!(text, r#"{"h":[[0.0,0.0],[1.0,0.0],[0.25,0.0]],"g":[[0.0,0.0],[0.0,0.0],[-0.25,0.0]]}"#);
        assert_eq!(HarmonicMap::from_json(&text).unwrap(), t);
        assert!(HarmonicMap::from_json(r#"{"h":[[0,0],[2,0]],"g":[[0,0]]}"#).is_err());
        assert!(HarmonicMap::from_json("not json").is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(vec![0.5, 0.4], 16).is_err());
        assert!(GridSpec::new(vec![0.5, 1.0], 16).is_err());
        assert!(GridSpec::new(vec![0.5], 4).is_err());
        let g = GridSpec::default();
        assert_eq!(g.len(), 11 * 512);
        assert_eq!(g.max_radius(), 0.999);
        assert_eq!(g.restricted(0.9).unwrap().radii().len(), 9);
    }

    fn series_strategy(max_deg: usize) -> impl Strategy<Value = AnalyticSeries> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=max_deg + 1)
            .prop_map(|v| AnalyticSeries::new(v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap())
    }

    fn disk_point() -> impl Strategy<Value = Complex64> {
        (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn eval_is_linear(s1 in series_strategy(12), s2 in series_strategy(12),
                          a in -2.0f64..2.0, b in -2.0f64..2.0, z in disk_point()) {
            let comb = s1.scale(c(a, 0.0)).add(&s2.scale(c(b, 0.0)));
            let lhs = comb.eval(z).unwrap();
            let rhs = s1.eval(z).unwrap() * a + s2.eval(z).unwrap() * b;
            let scale = 1.0 + s1.coeffs().iter().chain(s2.coeffs()).map(|c| c.norm()).sum::<f64>() * 2.0;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }

        #[test]
        fn derivative_matches_central_difference(s in series_strategy(10),
                                                 r in 0.0f64..0.9, t in 0.0f64..std::f64::consts::TAU) {
            let z = Complex64::from_polar(r, t);
            let eps = 1e-5;
            let fd = (s.horner(z + eps) - s.horner(z - eps)) / (2.0 * eps);
            let exact = s.differentiate(1).unwrap().horner(z);
            prop_assert!((fd - exact).norm() <= 1e-6 * (1.0 + exact.norm()));
        }

        #[test]
        fn hadamard_with_ones_is_identity(s in series_strategy(20)) {
            let ones = AnalyticSeries::from_fn(s.degree(), |_| c(1.0, 0.0));
            prop_assert_eq!(s.hadamard(&ones), s);
        }

        #[test]
        fn defect_ignores_quarter_turns(g in series_strategy(8), z in disk_point(), k in 0usize..4) {
            let g = AnalyticSeries::from_fn(g.degree(), |n| if n < 2 { c(0.0, 0.0) } else { g.coeff(n) });
            let f = HarmonicMap::new(AnalyticSeries::identity(3), g).unwrap();
            let lambda = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][k];
            let p = ClassParams::new(0.4, 1.0).unwrap();
            let z = z * 0.99;
            prop_assert_eq!(f.defect(&p, z), f.rotate_coanalytic(lambda).defect(&p, z));
        }

        #[test]
        fn jacobian_at_origin_is_one(g in series_strategy(8), h in series_strategy(8)) {
            let h = AnalyticSeries::from_fn(h.degree().max(1), |n| match n { 0 => c(0.0, 0.0), 1 => c(1.0, 0.0), _ => h.coeff(n) });
            let g = AnalyticSeries::from_fn(g.degree(), |n| if n < 2 { c(0.0, 0.0) } else { g.coeff(n) });
            let f = HarmonicMap::new(h, g).unwrap();
            prop_assert_eq!(f.jacobian(c(0.0, 0.0)), 1.0);
        }
    }
}
