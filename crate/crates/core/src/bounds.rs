//! Sharp coefficient and growth bounds, their extremal maps, and the
//! Lipschitz and boundary-length consequences for members with `beta <= 1 + alpha`.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::membership::{coarse_grid, pairwise_min, par_map, Certificate, Method, DEFAULT_TOLERANCE};
use crate::params::ClassParams;
use crate::series::{AnalyticSeries, GridSpec, HarmonicMap};

/// Default number of boundary samples for [`boundary_length`].
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 4096;

/// `beta / (n (n + alpha - 1))`, the sharp bound on `|a_n|` and `|b_n|`.
pub fn coeff_bound(n: usize, p: &ClassParams) -> Result<f64> {
    if n < 2 {
        return domain(format!("coefficient bounds start at n = 2, got {n}"));
    }
    let n = n as f64;
    Ok(p.beta() / (n * (n + p.alpha() - 1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEnvelope {
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `r -/+ (beta / (2(1+alpha))) r^2`; only valid when `beta <= 1 + alpha`.
pub fn growth_envelope(r: f64, p: &ClassParams) -> Result<GrowthEnvelope> {
    if !(0.0..1.0).contains(&r) {
        return domain(format!("growth envelope needs 0 <= r < 1, got {r}"));
    }
    if !p.is_close_to_convex_range() {
        return domain("growth bounds require beta <= 1 + alpha");
    }
    let k = growth_coefficient(p);
    // Factored as r (1 +/- k r): the same operation order as Horner on z + k z^2.
    Ok(GrowthEnvelope { r, lower: r * (-k * r + 1.0), upper: r * (k * r + 1.0) })
}

fn growth_coefficient(p: &ClassParams) -> f64 {
    p.beta() / (2.0 * (1.0 + p.alpha()))
}

/// CSV table `r,lower,upper` of the growth envelope.
pub fn envelope_csv(p: &ClassParams, radii: &[f64]) -> Result<String> {
    let mut out = String::from("r,lower,upper\n");
    for &r in radii {
        let e = growth_envelope(r, p)?;
        writeln!(out, "{},{},{}", e.r, e.lower, e.upper).expect("write to string");
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalKind {
    CoeffAnalytic,
    CoeffCoanalytic,
    GrowthAnalytic,
    GrowthCoanalytic,
    Theta,
}

impl FromStr for ExtremalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "coeff_analytic" => Self::CoeffAnalytic,
            "coeff_coanalytic" => Self::CoeffCoanalytic,
            "growth_analytic" => Self::GrowthAnalytic,
            "growth_coanalytic" => Self::GrowthCoanalytic,
            "theta" => Self::Theta,
            other => return domain(format!("unknown extremal kind `{other}`")),
        })
    }
}

fn monomial(n: usize, c: f64) -> AnalyticSeries {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(c, 0.0);
    AnalyticSeries::new(coeffs).expect("non-empty")
}

/// Extremal maps witnessing sharpness. `n` is used by the coefficient kinds only;
/// the growth kinds and `theta` are quadratic.
pub fn make_extremal(kind: ExtremalKind, n: usize, p: &ClassParams) -> Result<HarmonicMap> {
    let (n, c, analytic) = match kind {
        ExtremalKind::CoeffAnalytic => (n, coeff_bound(n, p)?, true),
        ExtremalKind::CoeffCoanalytic => (n, coeff_bound(n, p)?, false),
        ExtremalKind::GrowthAnalytic => (2, growth_coefficient(p), true),
        ExtremalKind::GrowthCoanalytic => (2, growth_coefficient(p), false),
        ExtremalKind::Theta => {
            let k = p.beta() / (4.0 * (1.0 + p.alpha()));
            return HarmonicMap::new(AnalyticSeries::identity(2).add(&monomial(2, k)), monomial(2, -k));
        }
    };
    let identity = AnalyticSeries::identity(n);
    if analytic {
        HarmonicMap::analytic(identity.add(&monomial(n, c)))
    } else {
        HarmonicMap::new(identity, monomial(n, c))
    }
}

/// `theta_{alpha,beta} = z + beta/(4(1+alpha)) (z^2 - conj(z)^2)`.
pub fn theta(p: &ClassParams) -> HarmonicMap {
    make_extremal(ExtremalKind::Theta, 2, p).expect("theta is always constructible")
}

/// `margin = min over coarse-grid pairs of 2|z1 - z2| - |f(z1) - f(z2)|`.
pub fn lipschitz_scan(f: &HarmonicMap, grid: &GridSpec) -> Certificate {
    let coarse = coarse_grid(grid);
    let points = coarse.points();
    let values = par_map(&points, |&z| f.eval_unchecked(z));
    let margin =
        pairwise_min(points.len(), |i, j| 2.0 * (points[i] - points[j]).norm() - (values[i] - values[j]).norm());
    Certificate::new(Method::LipschitzScan, margin, DEFAULT_TOLERANCE, Some(&coarse)).with_degree(f.degree())
}

/// Lipschitz margin over explicit pairs of points in the closed disk.
pub fn lipschitz_margin_pairs(f: &HarmonicMap, pairs: &[(Complex64, Complex64)]) -> Result<f64> {
    let mut margin = f64::INFINITY;
    for &(z1, z2) in pairs {
        let d = (f.eval(z1)? - f.eval(z2)?).norm();
        margin = margin.min(2.0 * (z1 - z2).norm() - d);
    }
    Ok(margin)
}

/// Points `f(e^{2 pi i k / samples})`, `k = 0..samples`.
pub fn boundary_points(f: &HarmonicMap, samples: usize) -> Vec<Complex64> {
    let thetas: Vec<usize> = (0..samples).collect();
    par_map(&thetas, |&k| f.eval_unchecked(Complex64::from_polar(1.0, TAU * k as f64 / samples as f64)))
}

/// Polygonal length of the closed curve `theta -> f(e^{i theta})`.
pub fn boundary_length(f: &HarmonicMap, samples: usize) -> Result<f64> {
    if samples < 64 {
        return domain("boundary length needs at least 64 samples");
    }
    let pts = boundary_points(f, samples);
    Ok((0..samples).map(|k| (pts[(k + 1) % samples] - pts[k]).norm()).sum())
}

/// Draws `(alpha, beta)` with `alpha` in `(-1, alpha_max]` and
/// `beta` in `(0, beta_scale (1 + alpha)]`.
pub fn sample_params<R: Rng>(rng: &mut R, alpha_max: f64, beta_scale: f64) -> ClassParams {
    loop {
        let alpha = -1.0 + rng.gen::<f64>() * (alpha_max + 1.0);
        let beta = (1.0 - rng.gen::<f64>()) * beta_scale * (1.0 + alpha);
        if let Ok(p) = ClassParams::new(alpha, beta) {
            return p;
        }
    }
}

/// Random map satisfying the coefficient condition for `p`, stored at degree
/// `degree` (at least 2).
///
/// A random active degree is drawn, then nonnegative weights are spread over
/// the `a_n` and `b_n` slots so that `sum n(n+alpha-1)(|a_n|+|b_n|)` equals a
/// random fraction of `beta` (exactly `beta` one time in five); phases are uniform.
pub fn sample_member<R: Rng>(rng: &mut R, p: &ClassParams, degree: usize) -> HarmonicMap {
    let degree = degree.max(2);
    let active = rng.gen_range(2..=degree);
    let budget = if rng.gen_bool(0.2) { 1.0 } else { rng.gen::<f64>() } * p.beta();
    let slots = 2 * (active - 1);
    let mut shares: Vec<f64> = (0..slots)
        .map(|_| {
            let keep = rng.gen_bool(0.7);
            let e = -(1.0 - rng.gen::<f64>()).ln();
            if keep {
                e
            } else {
                0.0
            }
        })
        .collect();
    if shares.iter().all(|&s| s == 0.0) {
        let i = rng.gen_range(0..slots);
        shares[i] = 1.0;
    }
    let total: f64 = shares.iter().sum();
    let mut h = AnalyticSeries::identity(degree).coeffs().to_vec();
    let mut g = vec![Complex64::new(0.0, 0.0); degree + 1];
    for (slot, share) in shares.iter().enumerate() {
        let n = 2 + slot / 2;
        let weight = n as f64 * (n as f64 + p.alpha() - 1.0);
        let modulus = budget * share / total / weight;
        let phase = Complex64::from_polar(1.0, rng.gen::<f64>() * TAU);
        let target = if slot % 2 == 0 { &mut h } else { &mut g };
        target[n] = phase * modulus;
    }
    HarmonicMap::new(AnalyticSeries::new(h).expect("finite"), AnalyticSeries::new(g).expect("finite"))
        .expect("normalized by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membership::{coefficient_margin, grid_sup_certificate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn p(alpha: f64, beta: f64) -> ClassParams {
        ClassParams::new(alpha, beta).unwrap()
    }

    #[test]
    fn coeff_bound_examples() {
        assert_eq!(coeff_bound(2, &p(0.0, 1.0)).unwrap(), 0.5);
        assert_eq!(coeff_bound(3, &p(1.0, 2.0)).unwrap(), 2.0 / 9.0);
        assert_eq!(coeff_bound(2, &p(1.0, 2.0)).unwrap(), 0.5);
        assert!(coeff_bound(1, &p(0.0, 1.0)).is_err());
    }

    #[test]
    fn coeff_bound_monotonicity() {
        let base = p(0.3, 1.0);
        for n in 2..30 {
            assert!(coeff_bound(n + 1, &base).unwrap() < coeff_bound(n, &base).unwrap());
            assert!(coeff_bound(n, &p(0.4, 1.0)).unwrap() < coeff_bound(n, &base).unwrap());
            assert!(coeff_bound(n, &p(0.3, 1.1)).unwrap() > coeff_bound(n, &base).unwrap());
        }
    }

    #[test]
    fn growth_envelope_examples() {
        let e = growth_envelope(0.0, &p(0.7, 1.2)).unwrap();
        assert_eq!((e.lower, e.upper), (0.0, 0.0));
        let e = growth_envelope(0.5, &p(0.0, 1.0)).unwrap();
        assert_eq!((e.lower, e.upper), (0.375, 0.625));
        let e = growth_envelope(0.5, &p(1.0, 2.0)).unwrap();
        assert_eq!((e.lower, e.upper), (0.375, 0.625));
        assert!(growth_envelope(0.5, &p(0.0, 1.5)).is_err());
        assert!(growth_envelope(1.0, &p(0.0, 1.0)).is_err());
    }

    #[test]
    fn envelope_csv_has_header_and_rows() {
        let csv = envelope_csv(&p(0.0, 1.0), &[0.0, 0.5]).unwrap();
        assert_eq!(csv, "r,lower,upper\n0,0,0\n0.5,0.375,0.625\n");
    }

    #[test]
    fn extremal_examples() {
        let t = make_extremal(ExtremalKind::Theta, 0, &p(0.0, 1.0)).unwrap();
        assert_eq!(t.h(), &AnalyticSeries::from_real(&[0.0, 1.0, 0.25]).unwrap());
        assert_eq!(t.g(), &AnalyticSeries::from_real(&[0.0, 0.0, -0.25]).unwrap());
        let c = make_extremal(ExtremalKind::CoeffAnalytic, 2, &p(0.0, 1.0)).unwrap();
        assert_eq!(c.h(), &AnalyticSeries::from_real(&[0.0, 1.0, 0.5]).unwrap());
        let g = make_extremal(ExtremalKind::GrowthAnalytic, 7, &p(1.0, 2.0)).unwrap();
        assert_eq!(g.h(), &AnalyticSeries::from_real(&[0.0, 1.0, 0.5]).unwrap());
        let cc = make_extremal(ExtremalKind::CoeffCoanalytic, 4, &p(0.5, 1.0)).unwrap();
        assert_eq!(cc.g().coeff(4).re, coeff_bound(4, &p(0.5, 1.0)).unwrap());
        assert!(make_extremal(ExtremalKind::CoeffAnalytic, 1, &p(0.0, 1.0)).is_err());
        assert!("nonsense".parse::<ExtremalKind>().is_err());
    }

    #[test]
    fn extremals_are_sharp() {
        let params = p(0.8, 1.3);
        for n in 2..=8 {
            for kind in [ExtremalKind::CoeffAnalytic, ExtremalKind::CoeffCoanalytic] {
                let f = make_extremal(kind, n, &params).unwrap();
                assert!(coefficient_margin(&f, &params).unwrap().margin.abs() < 1e-15);
                for &r in &[0.3, 0.9, 0.999] {
                    let d = f.defect(&params, Complex64::from_polar(r, 0.4));
                    assert!((d - 1.3 * r.powi(n as i32 - 1)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn growth_extremal_attains_upper_bound() {
        let params = p(0.2, 0.9);
        let f = make_extremal(ExtremalKind::GrowthAnalytic, 2, &params).unwrap();
        for &r in &[0.25, 0.5, 0.75] {
            let v = f.eval(Complex64::new(r, 0.0)).unwrap().norm();
            assert_eq!(v, growth_envelope(r, &params).unwrap().upper);
        }
        // z + k conj(z)^2 = z (1 + k r e^{-3it}) reaches the lower bound at t = pi/3
        let f2 = make_extremal(ExtremalKind::GrowthCoanalytic, 2, &params).unwrap();
        let v = f2.eval(Complex64::from_polar(0.5, PI / 3.0)).unwrap().norm();
        assert!((v - growth_envelope(0.5, &params).unwrap().lower).abs() < 1e-14);
    }

    #[test]
    fn lipschitz_examples() {
        let grid = GridSpec::new(vec![0.5, 0.9], 16).unwrap();
        let c = lipschitz_scan(&HarmonicMap::identity(2), &grid);
        let min_gap = 2.0 * 0.5 * (PI / 16.0).sin();
        assert!((c.margin - min_gap).abs() < 1e-12);
        assert!(lipschitz_scan(&theta(&p(0.0, 1.0)), &GridSpec::default()).passed);
        let f1 = make_extremal(ExtremalKind::GrowthAnalytic, 2, &p(0.0, 1.0)).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let d = (f1.eval(one).unwrap() - f1.eval(-one).unwrap()).norm();
        assert_eq!(d, 2.0);
        assert_eq!(lipschitz_margin_pairs(&f1, &[(one, -one)]).unwrap(), 2.0);
    }

    #[test]
    fn boundary_length_examples() {
        let len = boundary_length(&HarmonicMap::identity(1), 4096).unwrap();
        assert!((len - TAU).abs() < 1e-6);
        assert!(boundary_length(&theta(&p(0.0, 1.0)), 4096).unwrap() < 4.0 * PI);
        let f1 = make_extremal(ExtremalKind::GrowthAnalytic, 2, &p(0.0, 1.0)).unwrap();
        assert!(boundary_length(&f1, 4096).unwrap() < 4.0 * PI);
        assert!(boundary_length(&f1, 32).is_err());
    }

    #[test]
    fn sampled_members_satisfy_coefficient_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let params = sample_params(&mut rng, 5.0, 1.5);
            let f = sample_member(&mut rng, &params, 10);
            assert_eq!(f.degree(), 10);
            assert!(f.is_h0());
            let c = coefficient_margin(&f, &params).unwrap();
            assert!(c.margin >= -1e-12 * params.beta());
            assert!(c.margin <= params.beta());
        }
    }

    #[test]
    fn sampled_members_pass_grid_sup() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = GridSpec::new(vec![0.5, 0.9, 0.999], 128).unwrap();
        for _ in 0..50 {
            let params = sample_params(&mut rng, 3.0, 1.0);
            let f = sample_member(&mut rng, &params, 8);
            assert!(grid_sup_certificate(&f, &params, &grid).passed);
        }
    }
}
