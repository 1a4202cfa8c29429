//! Seeded property suites. Each suite draws its inputs from its own ChaCha
//! stream, evaluates them in parallel and reduces in draw order, so a summary
//! depends only on the seed.

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bounds::{
    boundary_length, coeff_bound, growth_envelope, lipschitz_margin_pairs, make_extremal, sample_member, sample_params,
    theta, ExtremalKind, DEFAULT_BOUNDARY_SAMPLES,
};
use crate::constructions::{
    build, coefficient_sum_identity, condition_margin, convex_catalog, convolution_transform, herglotz_check,
    sample_condition_class, sample_condition_params, ConditionKind, ConstructionSpec, ConvexCatalog, Family,
};
use crate::error::{domain, Error, Result};
use crate::membership::{
    coefficient_margin, derivative_bound_check, grid_sup_certificate, lambda_samples, lambda_sweep, par_map,
    sense_preserving_certificate,
};
use crate::params::{
    beta_max_convex, beta_max_starlike, classify, convex_branch, convex_breakpoints, ClassParams, FormulaMode,
};
use crate::series::{convex_combination, AnalyticSeries, DefectTerms, GridSpec, HarmonicMap};
use crate::specfun::{
    f21_unit_sum, gauss_value, lemma_sum, pochhammer, sample_gauss_params, sample_lemma_params, HypergeometricParams,
    LemmaKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Series,
    Params,
    Membership,
    Bounds,
    Specfun,
    Constructions,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Series, Suite::Params, Suite::Membership, Suite::Bounds, Suite::Specfun, Suite::Constructions];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Series => "series",
            Suite::Params => "params",
            Suite::Membership => "membership",
            Suite::Bounds => "bounds",
            Suite::Specfun => "specfun",
            Suite::Constructions => "constructions",
            Suite::All => "all",
        }
    }

    fn stream(self) -> u64 {
        Suite::EACH.iter().position(|&s| s == self).unwrap_or(0) as u64
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .map_or_else(|| domain(format!("unknown suite `{s}`")), Ok)
    }
}

/// Outcome of one property: a trial passes when its margin is nonnegative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub suite: String,
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub worst_margin: f64,
}

impl PropertyResult {
    fn from_margins(suite: Suite, name: &str, margins: &[f64]) -> Self {
        let failures = margins.iter().filter(|m| !(**m >= 0.0)).count();
        // NaN counts as a failure and as the worst margin
        let worst =
            margins.iter().fold(f64::INFINITY, |w, &m| if m.is_nan() || w.is_nan() { f64::NAN } else { w.min(m) });
        Self {
            suite: suite.name().to_owned(),
            name: name.to_owned(),
            trials: margins.len(),
            failures,
            worst_margin: if worst.is_finite() { worst } else { -f64::MAX },
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub reports: Map<String, Value>,
}

impl VerifySummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

struct Run {
    suite: Suite,
    rng: ChaCha8Rng,
    properties: Vec<PropertyResult>,
    reports: Map<String, Value>,
}

impl Run {
    fn new(suite: Suite, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(suite.stream());
        Self { suite, rng, properties: Vec::new(), reports: Map::new() }
    }

    fn record(&mut self, name: &str, margins: &[f64]) {
        self.properties.push(PropertyResult::from_margins(self.suite, name, margins));
    }

    /// Draws inputs sequentially, evaluates them in parallel.
    fn property<T: Sync>(
        &mut self,
        name: &str,
        trials: usize,
        mut draw: impl FnMut(&mut ChaCha8Rng) -> T,
        check: impl Fn(&T) -> f64 + Sync + Send,
    ) {
        let inputs: Vec<T> = (0..trials).map(|_| draw(&mut self.rng)).collect();
        let margins = par_map(&inputs, check);
        self.record(name, &margins);
    }
}

/// Runs one suite, or all of them in a fixed order.
pub fn run(suite: Suite, seed: u64) -> VerifySummary {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut properties = Vec::new();
    let mut reports = Map::new();
    for s in suites {
        let mut r = Run::new(s, seed);
        match s {
            Suite::Series => series_suite(&mut r),
            Suite::Params => params_suite(&mut r),
            Suite::Membership => membership_suite(&mut r),
            Suite::Bounds => bounds_suite(&mut r),
            Suite::Specfun => specfun_suite(&mut r),
            Suite::Constructions => constructions_suite(&mut r),
            Suite::All => unreachable!(),
        }
        properties.extend(r.properties);
        reports.extend(r.reports);
    }
    VerifySummary { suite, seed, passed: properties.iter().all(PropertyResult::passed), properties, reports }
}

fn random_disk_point<R: Rng>(rng: &mut R, max_radius: f64) -> Complex64 {
    Complex64::from_polar(max_radius * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * TAU)
}

fn random_series<R: Rng>(rng: &mut R, degree: usize) -> AnalyticSeries {
    AnalyticSeries::from_fn(degree, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_normalized<R: Rng>(rng: &mut R, degree: usize) -> HarmonicMap {
    let mut h = random_series(rng, degree).coeffs().to_vec();
    let mut g = random_series(rng, degree).coeffs().to_vec();
    h[0] = Complex64::new(0.0, 0.0);
    h[1] = Complex64::new(1.0, 0.0);
    g[0] = Complex64::new(0.0, 0.0);
    g[1] = Complex64::new(0.0, 0.0);
    HarmonicMap::new(AnalyticSeries::new(h).expect("finite"), AnalyticSeries::new(g).expect("finite"))
        .expect("normalized")
}

/// `tol * scale - err`.
fn within(err: f64, tol: f64, scale: f64) -> f64 {
    tol * scale.max(1.0) - err
}

fn series_suite(r: &mut Run) {
    r.property(
        "eval_linearity",
        200,
        |rng| {
            let d = rng.gen_range(1..=16);
            (random_series(rng, d), random_series(rng, d), random_disk_point(rng, 1.0))
        },
        |(s1, s2, z)| {
            let lhs = s1.add(s2).eval(*z).expect("inside disk");
            let rhs = s1.eval(*z).expect("inside disk") + s2.eval(*z).expect("inside disk");
            within((lhs - rhs).norm(), 1e-12, lhs.norm())
        },
    );
    r.property(
        "derivative_matches_difference_quotient",
        200,
        |rng| {
            (
                {
                    let d = rng.gen_range(1..=12);
                    random_series(rng, d)
                },
                random_disk_point(rng, 0.9),
            )
        },
        |(s, z)| {
            let step = 1e-5;
            let d = s.differentiate(1).expect("order 1").eval(*z).expect("inside disk");
            let fd = (s.horner(*z + step) - s.horner(*z - step)) / (2.0 * step);
            within((d - fd).norm(), 1e-6, d.norm())
        },
    );
    r.property(
        "hadamard_with_ones_is_identity",
        100,
        |rng| {
            let d = rng.gen_range(1..=20);
            random_series(rng, d)
        },
        |s| {
            let ones = AnalyticSeries::from_fn(s.degree(), |_| Complex64::new(1.0, 0.0));
            if s.hadamard(&ones) == *s {
                0.0
            } else {
                -1.0
            }
        },
    );
    r.property(
        "quarter_turn_defect_invariance",
        200,
        |rng| {
            let f = {
                let d = rng.gen_range(2..=10);
                random_normalized(rng, d)
            };
            let p = sample_params(rng, 5.0, 2.0);
            (f, p, random_disk_point(rng, 0.999), rng.gen_range(1..4))
        },
        |(f, p, z, k)| {
            let lambda = Complex64::i().powi(*k);
            let d0 = f.defect(p, *z);
            let d1 = f.rotate_coanalytic(lambda).defect(p, *z);
            within((d0 - d1).abs(), 1e-12, d0)
        },
    );
    r.property(
        "json_round_trip",
        100,
        |rng| {
            let d = rng.gen_range(2..=12);
            random_normalized(rng, d)
        },
        |f| match HarmonicMap::from_json(&f.to_json()) {
            Ok(back) if back == *f => 0.0,
            _ => -1.0,
        },
    );
    r.property(
        "jacobian_at_origin",
        100,
        |rng| {
            let d = rng.gen_range(2..=12);
            random_normalized(rng, d)
        },
        |f| within((f.jacobian(Complex64::new(0.0, 0.0)) - 1.0).abs(), 0.0, 0.0),
    );
}

fn params_suite(r: &mut Run) {
    let margins: Vec<f64> = convex_breakpoints()
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let left = convex_branch(k, b, FormulaMode::Continuous);
            let right = convex_branch(k + 1, b, FormulaMode::Continuous);
            within((left - right).abs(), 1e-12, 0.0)
        })
        .collect();
    r.record("convex_breakpoint_continuity", &margins);
    let e2 = 2f64.exp();
    let at_one = beta_max_starlike(1.0, FormulaMode::Continuous).expect("defined at 1");
    let near: Vec<f64> = [1.0 - 1e-6, 1.0 + 1e-6]
        .iter()
        .map(|&a| beta_max_starlike(a, FormulaMode::Continuous).expect("defined"))
        .collect();
    r.record(
        "starlike_value_at_one",
        &[
            within((at_one - 4.0 * e2 / (1.0 + e2)).abs(), 1e-12, 0.0),
            within((near[0] - at_one).abs(), 1e-5, 0.0),
            within((near[1] - at_one).abs(), 1e-5, 0.0),
        ],
    );
    r.property(
        "convex_threshold_below_close_to_convex",
        500,
        |rng| rng.gen_range(-0.999..10.0),
        |&alpha: &f64| 1.0 + alpha - beta_max_convex(alpha, FormulaMode::Continuous).expect("alpha > -1"),
    );
    r.property(
        "literal_and_continuous_agree_past_first_breakpoint",
        500,
        |rng| rng.gen_range(convex_breakpoints()[0] + 1e-9..10.0),
        |&alpha: &f64| {
            let lit = beta_max_convex(alpha, FormulaMode::Literal).expect("valid");
            let cont = beta_max_convex(alpha, FormulaMode::Continuous).expect("valid");
            if lit == cont {
                0.0
            } else {
                -(lit - cont).abs()
            }
        },
    );
    r.property(
        "classification_monotone_in_beta",
        500,
        |rng| {
            let p = sample_params(rng, 5.0, 2.0);
            (p, ClassParams::new(p.alpha(), p.beta() * rng.gen::<f64>().max(1e-6)).expect("smaller beta"))
        },
        |(big, small)| {
            let (rb, rs) = (classify(big, FormulaMode::Continuous), classify(small, FormulaMode::Continuous));
            let ok = (!rb.convex || rs.convex)
                && (!rb.close_to_convex || rs.close_to_convex)
                && (rb.starlike != Some(true) || rs.starlike == Some(true));
            if ok {
                0.0
            } else {
                -1.0
            }
        },
    );
}

fn membership_suite(r: &mut Run) {
    let grid = GridSpec::default();
    r.property(
        "coefficient_condition_implies_grid_sup",
        200,
        |rng| {
            let p = sample_params(rng, 5.0, 2.0);
            (
                {
                    let d = rng.gen_range(2..=12);
                    sample_member(rng, &p, d)
                },
                p,
            )
        },
        |(f, p)| grid_sup_certificate(f, p, &grid).margin + 1e-9,
    );
    let coarse = GridSpec::new(vec![0.25, 0.5, 0.75, 0.9, 0.99], 64).expect("valid grid");
    r.property(
        "lambda_sweep_within_grid_sup",
        50,
        |rng| {
            let p = sample_params(rng, 5.0, 2.0);
            (
                {
                    let d = rng.gen_range(2..=10);
                    sample_member(rng, &p, d)
                },
                p,
            )
        },
        |(f, p)| {
            let sweep = lambda_sweep(f, p, &coarse, 16).expect("16 samples").margin;
            sweep - grid_sup_certificate(f, p, &coarse).margin + 1e-12
        },
    );
    r.property(
        "members_satisfy_derivative_bound",
        50,
        |rng| {
            let p = sample_params(rng, 5.0, 2.0);
            (
                {
                    let d = rng.gen_range(2..=10);
                    sample_member(rng, &p, d)
                },
                p,
            )
        },
        |(f, p)| derivative_bound_check(f, p, &coarse, 16).expect("16 samples").margin + 1e-9,
    );
    r.property(
        "members_are_sense_preserving",
        200,
        |rng| {
            let p = sample_params(rng, 5.0, 1.0);
            {
                let d = rng.gen_range(2..=12);
                sample_member(rng, &p, d)
            }
        },
        |f| sense_preserving_certificate(f, &grid).margin,
    );
}

fn bounds_suite(r: &mut Run) {
    r.property(
        "theta_coefficient_margin_exact",
        100,
        |rng| sample_params(rng, 5.0, 1.0),
        |p| within(coefficient_margin(&theta(p), p).expect("H0").margin.abs(), 4.0 * f64::EPSILON, p.beta()),
    );
    r.property(
        "coefficient_extremal_sharpness",
        180,
        |rng| (rng.gen_range(2..=10usize), sample_params(rng, 5.0, 2.0)),
        |(n, p)| {
            let f = make_extremal(ExtremalKind::CoeffAnalytic, *n, p).expect("n >= 2");
            let bound = coeff_bound(*n, p).expect("n >= 2");
            let z = Complex64::new(0.999, 0.0);
            let defect = DefectTerms::new(&f, p.alpha()).defect(z);
            let expected = p.beta() * 0.999f64.powi(*n as i32 - 1);
            within((f.h().coeff(*n).norm() - bound).abs(), 0.0, 0.0).min(within((defect - expected).abs(), 1e-10, 0.0))
        },
    );
    r.property(
        "growth_envelope_contains_members",
        200,
        |rng| {
            let p = sample_params(rng, 5.0, 1.0);
            let f = {
                let d = rng.gen_range(2..=12);
                sample_member(rng, &p, d)
            };
            let zs: Vec<Complex64> = (0..16).map(|_| random_disk_point(rng, 0.999)).collect();
            (f, p, zs)
        },
        |(f, p, zs)| {
            zs.iter()
                .map(|&z| {
                    let e = growth_envelope(z.norm(), p).expect("r < 1");
                    let v = f.eval(z).expect("inside disk").norm();
                    (v - e.lower + 1e-10).min(e.upper - v + 1e-10)
                })
                .fold(f64::INFINITY, f64::min)
        },
    );
    r.property(
        "lipschitz_pairs",
        100,
        |rng| {
            let p = sample_params(rng, 5.0, 1.0);
            let f = {
                let d = rng.gen_range(2..=12);
                sample_member(rng, &p, d)
            };
            let pairs: Vec<(Complex64, Complex64)> =
                (0..100).map(|_| (random_disk_point(rng, 1.0), random_disk_point(rng, 1.0))).collect();
            (f, pairs)
        },
        |(f, pairs)| lipschitz_margin_pairs(f, pairs).expect("closed disk") + 1e-10,
    );
    r.property(
        "boundary_length_below_4pi",
        50,
        |rng| {
            let p = sample_params(rng, 5.0, 1.0);
            {
                let d = rng.gen_range(2..=12);
                sample_member(rng, &p, d)
            }
        },
        |f| 4.0 * PI - boundary_length(f, DEFAULT_BOUNDARY_SAMPLES).expect("enough samples"),
    );
}

fn specfun_suite(r: &mut Run) {
    for (kind, name) in [
        (LemmaKind::A, "lemma_a_matches_oracle"),
        (LemmaKind::B, "lemma_b_matches_oracle"),
        (LemmaKind::C, "lemma_c_matches_oracle"),
    ] {
        r.property(
            name,
            100,
            |rng| sample_lemma_params(rng, kind),
            move |p| lemma_sum(kind, p).map_or(-1.0, |c| 1e-8 - c.rel_gap()),
        );
    }
    r.property("gauss_value_matches_series", 100, sample_gauss_params, |p| {
        let closed = gauss_value(p).expect("convergent");
        let series = f21_unit_sum(p).expect("convergent").value;
        within((closed - series).abs(), 1e-9, closed.abs())
    });
    r.property(
        "pochhammer_recurrence",
        200,
        |rng| (rng.gen_range(-20.0..20.0), rng.gen_range(0..30usize)),
        |&(x, n): &(f64, usize)| {
            let lhs = pochhammer(x, n + 1);
            within((lhs - (x + n as f64) * pochhammer(x, n)).abs(), 1e-12, lhs.abs())
        },
    );
    let p = HypergeometricParams::new(2.0, 2.0, 6.0).expect("valid");
    if let Ok(check) = lemma_sum(LemmaKind::C, &p) {
        let gap = check.literal_gap.unwrap_or(f64::NAN);
        r.record("lemma_c_literal_gap_is_ten_thirds", &[within((gap - 10.0 / 3.0).abs(), 1e-8, 0.0)]);
        r.reports.insert(
            "lemma_c_literal_vs_corrected".into(),
            json!({
                "a": 2.0, "b": 2.0, "c": 6.0,
                "corrected_closed_form": check.closed_form,
                "literal_closed_form": check.literal_closed_form,
                "oracle_value": check.oracle_value,
                "corrected_gap": check.abs_gap,
                "literal_gap": gap,
            }),
        );
    }
}

fn constructions_suite(r: &mut Run) {
    for kind in [ConditionKind::A, ConditionKind::B, ConditionKind::C] {
        let name = format!("condition_{}_implies_coefficient_margin", ["a", "b", "c"][kind as usize]);
        r.property(
            &name,
            50,
            |rng| {
                let p = sample_condition_params(rng, kind);
                (p, sample_condition_class(rng, kind, &p))
            },
            move |(p, cp)| match condition_margin(kind, p, cp) {
                Ok(rep) if rep.margin >= 0.0 => rep.coefficient_margin_crosscheck + 1e-9,
                // vacuous when the condition does not hold
                Ok(_) => f64::MAX,
                Err(_) => -1.0,
            },
        );
        let name = format!("coefficient_sum_identity_{}", ["a", "b", "c"][kind as usize]);
        r.property(
            &name,
            20,
            |rng| {
                let p = sample_condition_params(rng, kind);
                (p, ClassParams::new(rng.gen_range(-0.9..3.0), 1.0).expect("valid"))
            },
            move |(p, cp)| match coefficient_sum_identity(kind.family(), p, cp) {
                Ok((sum, closed)) => within((sum - closed).abs(), 1e-8, closed.abs()),
                Err(_) => -1.0,
            },
        );
    }
    let fixed = condition_margin(
        ConditionKind::A,
        &HypergeometricParams::new(-1.0, -1.0, 1.0).expect("valid"),
        &ClassParams::new(0.0, 8.0).expect("valid"),
    );
    let fixed_margin =
        fixed
            .map_or(-1.0, |rep| if rep.margin == 0.0 && rep.coefficient_margin_crosscheck == 0.0 { 0.0 } else { -1.0 });
    r.record("fixed_instance_margins_zero", &[fixed_margin]);
    let mut poly = Vec::new();
    let unit = ClassParams::new(0.0, 1.0).expect("valid");
    for m in 1..=6u32 {
        for c in [1.0, 2.0, 5.5] {
            for (family, extra) in [(Family::F1, 2), (Family::F2, 1), (Family::F3, 2)] {
                let a = -(m as f64);
                let hyper =
                    HypergeometricParams::new(a, a, c).map(|p| build(&ConstructionSpec::hyper(family, p, unit)));
                let lhs = ConstructionSpec::poly(family, m, c, unit).and_then(|s| build(&s));
                let ok = matches!((lhs, hyper), (Ok(x), Ok(Ok(y))) if x == y && x.g().effective_degree() == m as usize + extra);
                poly.push(if ok { 0.0 } else { -1.0 });
            }
        }
    }
    r.record("polynomial_equivalence_and_degree", &poly);
    let grid = GridSpec::default();
    r.property(
        "convex_combination_closure",
        50,
        |rng| {
            let p = sample_params(rng, 5.0, 2.0);
            let degree = rng.gen_range(2..=10);
            let maps: Vec<HarmonicMap> = (0..5).map(|_| sample_member(rng, &p, degree)).collect();
            let raw: Vec<f64> = (0..5).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            (maps, weights, p)
        },
        |(maps, weights, p)| match convex_combination(maps, weights) {
            Ok(f) => grid_sup_certificate(&f, p, &grid).margin + 1e-9,
            Err(_) => -1.0,
        },
    );
    let lambdas = lambda_samples(16);
    r.property(
        "convolution_closure",
        20,
        |rng| {
            let p = sample_params(rng, 5.0, 2.0);
            (
                {
                    let d = rng.gen_range(2..=10);
                    sample_member(rng, &p, d)
                },
                p,
            )
        },
        |(f, p)| {
            let mut worst = f64::INFINITY;
            for name in [ConvexCatalog::HalfPlane, ConvexCatalog::LogMap] {
                let phi = convex_catalog(name, f.degree()).expect("degree >= 2");
                for &l in &lambdas {
                    let m = convolution_transform(f, &phi, l)
                        .map_or(-1.0, |t| grid_sup_certificate(&t, p, &grid).margin + 1e-9);
                    worst = worst.min(m);
                }
            }
            worst
        },
    );
    let catalog = [
        herglotz_check(&convex_catalog(ConvexCatalog::HalfPlane, 16384).expect("N >= 2"), &grid).margin,
        herglotz_check(&convex_catalog(ConvexCatalog::LogMap, 64).expect("N >= 2"), &grid).margin,
    ];
    r.record("catalog_passes_herglotz", &catalog);
}
