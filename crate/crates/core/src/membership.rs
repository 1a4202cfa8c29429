//! Membership certificates for the harmonic class.
//!
//! Every check reduces to a signed margin: positive means the defining
//! inequality (or the proxy being tested) holds with room to spare. Sweeps
//! evaluate each sample point independently in parallel and reduce the
//! per-point results sequentially in grid order, so margins are bit-identical
//! across runs and thread counts.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::params::ClassParams;
use crate::series::{DefectTerms, DerivativeParts, GridSpec, HarmonicMap};

/// Default absolute tolerance on certificate margins.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Default number of rotation samples on the unit circle.
pub const DEFAULT_LAMBDA_COUNT: usize = 256;

/// Radius cap of the coarse sub-grid used by pairwise scans.
pub const PAIRWISE_MAX_RADIUS: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    CoefficientSum,
    GridSup,
    LambdaSweep,
    DerivativeBound,
    SensePreserving,
    InjectivityScan,
    LipschitzScan,
    Herglotz,
}

impl Method {
    /// Strict methods pass only on a strictly positive margin.
    pub fn is_strict(self) -> bool {
        matches!(self, Method::SensePreserving | Method::InjectivityScan)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub method: Method,
    pub margin: f64,
    pub passed: bool,
    pub grid: Option<GridSpec>,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_degree: Option<usize>,
}

impl Certificate {
    /// `passed = margin >= -tolerance`, or `margin > 0` for strict methods.
    pub fn new(method: Method, margin: f64, tolerance: f64, grid: Option<&GridSpec>) -> Self {
        let passed = if method.is_strict() { margin > 0.0 } else { margin >= -tolerance };
        Self {
            method,
            margin,
            passed,
            max_radius: grid.map(GridSpec::max_radius),
            grid: grid.cloned(),
            tolerance: if method.is_strict() { 0.0 } else { tolerance },
            lambda_count: None,
            truncation_degree: None,
        }
    }

    fn with_lambda_count(mut self, count: usize) -> Self {
        self.lambda_count = Some(count);
        self
    }

    pub(crate) fn with_degree(mut self, degree: usize) -> Self {
        self.truncation_degree = Some(degree);
        self
    }
}

/// Sweep parameters shared by the grid-based checks.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub grid: GridSpec,
    pub lambda_count: usize,
    pub tolerance: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { grid: GridSpec::default(), lambda_count: DEFAULT_LAMBDA_COUNT, tolerance: DEFAULT_TOLERANCE }
    }
}

pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.par_iter().map(f).collect()
}

fn fold_max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn fold_min(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Unit-circle samples `e^{2 pi i k / count}`.
pub fn lambda_samples(count: usize) -> Vec<Complex64> {
    (0..count).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / count as f64)).collect()
}

/// Weighted coefficient sum `sum_{n>=2} n (n + alpha - 1) (|a_n| + |b_n|)`.
pub fn coefficient_sum(f: &HarmonicMap, alpha: f64) -> f64 {
    (2..=f.degree())
        .map(|n| {
            let n_f = n as f64;
            n_f * (n_f + alpha - 1.0) * (f.h().coeff(n).norm() + f.g().coeff(n).norm())
        })
        .sum()
}

/// Sufficient coefficient condition: `margin = beta - sum`. Requires `f` in H⁰.
pub fn coefficient_margin(f: &HarmonicMap, p: &ClassParams) -> Result<Certificate> {
    coefficient_margin_with(f, p, DEFAULT_TOLERANCE)
}

pub fn coefficient_margin_with(f: &HarmonicMap, p: &ClassParams, tolerance: f64) -> Result<Certificate> {
    if !f.is_h0() {
        return domain("coefficient condition needs a map in H0 (g'(0) = 0)");
    }
    let margin = p.beta() - coefficient_sum(f, p.alpha());
    Ok(Certificate::new(Method::CoefficientSum, margin, tolerance, None).with_degree(f.degree()))
}

/// Largest sampled defect over the grid.
pub fn grid_sup_defect(f: &HarmonicMap, p: &ClassParams, grid: &GridSpec) -> f64 {
    let terms = DefectTerms::new(f, p.alpha());
    fold_max(&par_map(&grid.points(), |&z| terms.defect(z)))
}

/// `margin = beta - max_grid defect(f, z)`.
pub fn grid_sup_certificate(f: &HarmonicMap, p: &ClassParams, grid: &GridSpec) -> Certificate {
    grid_sup_certificate_with(f, p, grid, DEFAULT_TOLERANCE)
}

pub fn grid_sup_certificate_with(f: &HarmonicMap, p: &ClassParams, grid: &GridSpec, tolerance: f64) -> Certificate {
    let margin = p.beta() - grid_sup_defect(f, p, grid);
    Certificate::new(Method::GridSup, margin, tolerance, Some(grid)).with_degree(f.degree())
}

/// `margin = beta - max over lambda samples and grid of |z F'' + alpha (F' - 1)|`
/// for the slices `F = h + lambda g`.
pub fn lambda_sweep(f: &HarmonicMap, p: &ClassParams, grid: &GridSpec, lambda_count: usize) -> Result<Certificate> {
    lambda_sweep_with(f, p, grid, lambda_count, DEFAULT_TOLERANCE)
}

pub fn lambda_sweep_with(
    f: &HarmonicMap,
    p: &ClassParams,
    grid: &GridSpec,
    lambda_count: usize,
    tolerance: f64,
) -> Result<Certificate> {
    if lambda_count < 8 {
        return domain("lambda sweep needs at least 8 rotation samples");
    }
    let terms = DefectTerms::new(f, p.alpha());
    let lambdas = lambda_samples(lambda_count);
    let per_point = par_map(&grid.points(), |&z| {
        let (a, b) = terms.terms(z);
        fold_max(&lambdas.iter().map(|&l| (a + l * b).norm()).collect::<Vec<_>>())
    });
    let margin = p.beta() - fold_max(&per_point);
    Ok(Certificate::new(Method::LambdaSweep, margin, tolerance, Some(grid))
        .with_lambda_count(lambda_count)
        .with_degree(f.degree()))
}

/// `margin = min over samples of (beta/(1+alpha)) |z| - |F_lambda'(z) - 1|`.
pub fn derivative_bound_check(
    f: &HarmonicMap,
    p: &ClassParams,
    grid: &GridSpec,
    lambda_count: usize,
) -> Result<Certificate> {
    derivative_bound_check_with(f, p, grid, lambda_count, DEFAULT_TOLERANCE)
}

pub fn derivative_bound_check_with(
    f: &HarmonicMap,
    p: &ClassParams,
    grid: &GridSpec,
    lambda_count: usize,
    tolerance: f64,
) -> Result<Certificate> {
    if lambda_count < 8 {
        return domain("derivative bound check needs at least 8 rotation samples");
    }
    let slope = p.beta() / (1.0 + p.alpha());
    let parts = DerivativeParts::new(f);
    let lambdas = lambda_samples(lambda_count);
    let one = Complex64::new(1.0, 0.0);
    let per_point = par_map(&grid.points(), |&z| {
        let (dh, dg) = parts.at(z);
        let bound = slope * z.norm();
        fold_min(&lambdas.iter().map(|&l| bound - (dh - one + l * dg).norm()).collect::<Vec<_>>())
    });
    let margin = fold_min(&per_point);
    Ok(Certificate::new(Method::DerivativeBound, margin, tolerance, Some(grid))
        .with_lambda_count(lambda_count)
        .with_degree(f.degree()))
}

/// `margin = min_grid J_f`; passes only if the Jacobian is positive at every sample.
pub fn sense_preserving_certificate(f: &HarmonicMap, grid: &GridSpec) -> Certificate {
    let parts = DerivativeParts::new(f);
    let margin = fold_min(&par_map(&grid.points(), |&z| parts.jacobian(z)));
    Certificate::new(Method::SensePreserving, margin, 0.0, Some(grid)).with_degree(f.degree())
}

/// Minimum over distinct index pairs `i < j` of `pair(i, j)`, parallel over `i`.
pub(crate) fn pairwise_min(count: usize, pair: impl Fn(usize, usize) -> f64 + Sync + Send) -> f64 {
    let rows: Vec<usize> = (0..count).collect();
    let per_row = par_map(&rows, |&i| {
        let mut m = f64::INFINITY;
        for j in i + 1..count {
            m = m.min(pair(i, j));
        }
        m
    });
    fold_min(&per_row)
}

/// The coarse sub-grid (radii `<= 0.9`) or the innermost circle if none qualifies.
pub fn coarse_grid(grid: &GridSpec) -> GridSpec {
    grid.restricted(PAIRWISE_MAX_RADIUS)
        .unwrap_or_else(|| GridSpec::new(vec![grid.radii()[0]], grid.angles_per_circle()).expect("valid sub-grid"))
}

/// Univalence falsifier: `margin = min |f(z1) - f(z2)| / |z1 - z2|` over pairs of the coarse sub-grid.
pub fn injectivity_scan(f: &HarmonicMap, grid: &GridSpec) -> Certificate {
    let coarse = coarse_grid(grid);
    let points = coarse.points();
    let values = par_map(&points, |&z| f.eval_unchecked(z));
    let ratio_sq =
        pairwise_min(points.len(), |i, j| (values[i] - values[j]).norm_sqr() / (points[i] - points[j]).norm_sqr());
    Certificate::new(Method::InjectivityScan, ratio_sq.sqrt(), 0.0, Some(&coarse)).with_degree(f.degree())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::AnalyticSeries;

    fn theta01() -> HarmonicMap {
        let h = AnalyticSeries::from_real(&[0.0, 1.0, 0.25]).unwrap();
        let g = AnalyticSeries::from_real(&[0.0, 0.0, -0.25]).unwrap();
        HarmonicMap::new(h, g).unwrap()
    }

    fn p01() -> ClassParams {
        ClassParams::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn coefficient_margin_examples() {
        let c = coefficient_margin(&theta01(), &p01()).unwrap();
        assert_eq!(c.margin, 0.0);
        assert!(c.passed);
        let p = ClassParams::new(0.3, 0.7).unwrap();
        assert_eq!(coefficient_margin(&HarmonicMap::identity(5), &p).unwrap().margin, 0.7);
        let f = HarmonicMap::analytic(AnalyticSeries::from_real(&[0.0, 1.0, 1.0]).unwrap()).unwrap();
        let c = coefficient_margin(&f, &p01()).unwrap();
        assert_eq!(c.margin, -1.0);
        assert!(!c.passed);
        let not_h0 =
            HarmonicMap::new(AnalyticSeries::identity(2), AnalyticSeries::from_real(&[0.0, 0.5]).unwrap()).unwrap();
        assert!(coefficient_margin(&not_h0, &p01()).is_err());
    }

    #[test]
    fn grid_sup_examples() {
        let grid = GridSpec::default();
        let p = ClassParams::new(1.2, 0.6).unwrap();
        let c = grid_sup_certificate(&HarmonicMap::identity(3), &p, &grid);
        assert_eq!(c.margin, 0.6);
        assert_eq!(c.max_radius, Some(0.999));
        let c = grid_sup_certificate(&theta01(), &p01(), &grid);
        assert!((c.margin - 0.001).abs() < 1e-12);
        assert!(c.passed);
        let (alpha, beta) = (0.5, 1.2);
        let p = ClassParams::new(alpha, beta).unwrap();
        let f1 = HarmonicMap::analytic(AnalyticSeries::from_real(&[0.0, 1.0, beta / (2.0 * (1.0 + alpha))]).unwrap())
            .unwrap();
        let c = grid_sup_certificate(&f1, &p, &grid);
        assert!((c.margin - beta * 0.001).abs() < 1e-12);
    }

    #[test]
    fn lambda_sweep_examples() {
        let grid = GridSpec::new(vec![0.3, 0.6, 0.9], 64).unwrap();
        let p = ClassParams::new(0.4, 1.1).unwrap();
        let h = AnalyticSeries::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.2)])
            .unwrap();
        let analytic = HarmonicMap::analytic(h).unwrap();
        let a = lambda_sweep(&analytic, &p, &grid, 8).unwrap();
        let b = lambda_sweep(&analytic, &p, &grid, 64).unwrap();
        assert_eq!(a.margin, b.margin);
        assert_eq!(a.margin, grid_sup_certificate(&analytic, &p, &grid).margin);

        // lambda = -1 is sampled and attains |A| + |B| = r on the real axis
        let c = lambda_sweep(&theta01(), &p01(), &grid, 8).unwrap();
        assert!((c.margin - 0.1).abs() < 1e-15);
        assert!(lambda_sweep(&theta01(), &p01(), &grid, 4).is_err());
    }

    #[test]
    fn lambda_sweep_never_exceeds_grid_sup() {
        let grid = GridSpec::new(vec![0.5, 0.95], 32).unwrap();
        let h =
            AnalyticSeries::new(vec![0.0.into(), 1.0.into(), Complex64::new(0.1, -0.05), Complex64::new(0.0, 0.03)])
                .unwrap();
        let g =
            AnalyticSeries::new(vec![0.0.into(), 0.0.into(), Complex64::new(-0.02, 0.07), Complex64::new(0.01, 0.01)])
                .unwrap();
        let f = HarmonicMap::new(h, g).unwrap();
        let p = ClassParams::new(0.2, 1.0).unwrap();
        let sup = grid_sup_certificate(&f, &p, &grid).margin;
        let mut prev = f64::INFINITY;
        for k in [8, 16, 64, 256, 1024] {
            let m = lambda_sweep(&f, &p, &grid, k).unwrap().margin;
            assert!(m >= sup - 1e-15);
            if k > 8 {
                assert!(m <= prev + 1e-15, "margin should not grow as lambda_count doubles");
            }
            prev = m;
        }
        assert!(prev - sup < 1e-5);
    }

    #[test]
    fn derivative_bound_examples() {
        let grid = GridSpec::new(vec![0.25, 0.5, 0.75], 32).unwrap();
        // |F' - 1| = 0, so the margin is the smallest sampled |z|
        let c = derivative_bound_check(&HarmonicMap::identity(2), &p01(), &grid, 8).unwrap();
        assert_eq!(c.margin, 0.25);
        let c = derivative_bound_check(&theta01(), &p01(), &grid, 8).unwrap();
        assert!(c.margin.abs() < 1e-15 && c.passed);
        let (alpha, beta) = (1.0, 2.0);
        let p = ClassParams::new(alpha, beta).unwrap();
        let f1 = HarmonicMap::analytic(AnalyticSeries::from_real(&[0.0, 1.0, 0.5]).unwrap()).unwrap();
        let c = derivative_bound_check(&f1, &p, &grid, 8).unwrap();
        assert!(c.margin.abs() < 1e-15);
    }

    #[test]
    fn sense_preserving_examples() {
        let grid = GridSpec::default();
        assert_eq!(sense_preserving_certificate(&HarmonicMap::identity(2), &grid).margin, 1.0);
        let c = sense_preserving_certificate(&theta01(), &grid);
        // J(x) = (1 + x/2)^2 - x^2/4 = 1 + x on the real axis, minimized at x = -r
        assert!((c.margin - 0.001).abs() < 1e-12);
        assert!(c.passed);
        let h = AnalyticSeries::from_real(&[0.0, 1.0, 0.2]).unwrap();
        let degenerate = HarmonicMap::new(h.clone(), h).unwrap();
        let c = sense_preserving_certificate(&degenerate, &grid);
        assert_eq!(c.margin, 0.0);
        assert!(!c.passed);
    }

    #[test]
    fn injectivity_examples() {
        let grid = GridSpec::new(vec![0.3, 0.6, 0.9, 0.99], 48).unwrap();
        let c = injectivity_scan(&HarmonicMap::identity(2), &grid);
        assert!((c.margin - 1.0).abs() < 1e-12);
        assert_eq!(c.max_radius, Some(0.9));
        assert!(injectivity_scan(&theta01(), &grid).passed);
        // z + z^2 lies outside the class at beta = 1; the proxy result is only reported
        let f = HarmonicMap::analytic(AnalyticSeries::from_real(&[0.0, 1.0, 1.0]).unwrap()).unwrap();
        let c = injectivity_scan(&f, &grid);
        assert!(c.margin.is_finite());
    }

    #[test]
    fn certificates_serialize() {
        let c = grid_sup_certificate(&theta01(), &p01(), &GridSpec::new(vec![0.5], 8).unwrap());
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["method"], "grid_sup");
        assert_eq!(v["grid"]["angles_per_circle"], 8);
        let back: Certificate = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
    }
}
