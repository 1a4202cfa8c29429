//! C ABI over `harmap`.
//!
//! Every fallible function returns a [`HarmapStatus`] and writes results
//! through out-pointers. On failure the message is kept per thread and can be
//! read with [`harmap_last_error_message`]. Maps are opaque [`HarmapMap`]
//! handles released with [`harmap_map_free`]; strings returned by the library
//! are released with [`harmap_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use harmap::bounds::{self, ExtremalKind};
use harmap::constructions::{self, ConstructionSpec, Family};
use harmap::membership::{self, Certificate};
use harmap::specfun::{self, HypergeometricParams, LemmaKind};
use harmap::verify::{self, Suite};
use harmap::{ClassParams, Error, GridSpec, HarmonicMap};
use num_complex::Complex64;

/// Status codes. `HARMAP_STATUS_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Divergence = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmapExtremal {
    CoeffAnalytic = 0,
    CoeffCoanalytic = 1,
    GrowthAnalytic = 2,
    GrowthCoanalytic = 3,
    Theta = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmapFamily {
    F1 = 1,
    F2 = 2,
    F3 = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmapLemma {
    A = 0,
    B = 1,
    C = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HarmapComplex {
    pub re: f64,
    pub im: f64,
}

/// Summary of a certificate. The full record is available as JSON through
/// [`harmap_certificate_json`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HarmapCertificate {
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Opaque map handle.
pub struct HarmapMap(HarmonicMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(HarmapStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => HarmapStatus::Domain,
            Error::Divergence(_) => HarmapStatus::Divergence,
            Error::Parse(_) => HarmapStatus::Parse,
            Error::Io(_) => HarmapStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn null(what: &str) -> Failure {
    Failure(HarmapStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, recording the error message and mapping panics to `Panic`.
fn guard(body: impl FnOnce() -> Outcome) -> HarmapStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HarmapStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HarmapStatus::Panic
        }
    }
}

unsafe fn map_ref<'a>(map: *const HarmapMap) -> std::result::Result<&'a HarmonicMap, Failure> {
    map.as_ref().map(|m| &m.0).ok_or_else(|| null("map"))
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &str) -> std::result::Result<&'a mut T, Failure> {
    out.as_mut().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> std::result::Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure(HarmapStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn c_string(s: String) -> std::result::Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(HarmapStatus::InvalidUtf8, "string contains a nul byte".into()))
}

fn boxed(f: HarmonicMap) -> *mut HarmapMap {
    Box::into_raw(Box::new(HarmapMap(f)))
}

fn params(alpha: f64, beta: f64) -> std::result::Result<ClassParams, Failure> {
    Ok(ClassParams::new(alpha, beta)?)
}

fn cert(c: &Certificate) -> HarmapCertificate {
    HarmapCertificate { margin: c.margin, tolerance: c.tolerance, passed: c.passed }
}

fn z(c: HarmapComplex) -> Complex64 {
    Complex64::new(c.re, c.im)
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn harmap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn harmap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a map from `{"h": [[re, im], ...], "g": [...]}`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn harmap_map_from_json(json: *const c_char, out: *mut *mut HarmapMap) -> HarmapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = boxed(HarmonicMap::from_json(str_arg(json, "json")?)?);
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle; `out` receives a string for [`harmap_string_free`].
#[no_mangle]
pub unsafe extern "C" fn harmap_map_to_json(map: *const HarmapMap, out: *mut *mut c_char) -> HarmapStatus {
    guard(|| {
        let json = map_ref(map)?.to_json();
        *out_ref(out, "out")? = c_string(json)?;
        Ok(())
    })
}

/// Releases a map. Null is ignored.
///
/// # Safety
/// `map` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn harmap_map_free(map: *mut HarmapMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Truncation degree of the map, or 0 for a null handle.
///
/// # Safety
/// `map` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn harmap_map_degree(map: *const HarmapMap) -> usize {
    map.as_ref().map_or(0, |m| m.0.degree())
}

/// # Safety
/// `map` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_map_eval(
    map: *const HarmapMap,
    z_in: HarmapComplex,
    out: *mut HarmapComplex,
) -> HarmapStatus {
    guard(|| {
        let w = map_ref(map)?.eval(z(z_in))?;
        *out_ref(out, "out")? = HarmapComplex { re: w.re, im: w.im };
        Ok(())
    })
}

/// Pointwise defect `|z h'' + alpha (h' - 1)| + |z g'' + alpha g'|`.
///
/// # Safety
/// `map` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_map_defect(
    map: *const HarmapMap,
    alpha: f64,
    beta: f64,
    z_in: HarmapComplex,
    out: *mut f64,
) -> HarmapStatus {
    guard(|| {
        let p = params(alpha, beta)?;
        *out_ref(out, "out")? = map_ref(map)?.defect(&p, z(z_in));
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_map_jacobian(
    map: *const HarmapMap,
    z_in: HarmapComplex,
    out: *mut f64,
) -> HarmapStatus {
    guard(|| {
        *out_ref(out, "out")? = map_ref(map)?.jacobian(z(z_in));
        Ok(())
    })
}

/// Sharpness witness of the given kind; `n` is the coefficient index where it applies.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_make_extremal(
    kind: HarmapExtremal,
    n: usize,
    alpha: f64,
    beta: f64,
    out: *mut *mut HarmapMap,
) -> HarmapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let kind = match kind {
            HarmapExtremal::CoeffAnalytic => ExtremalKind::CoeffAnalytic,
            HarmapExtremal::CoeffCoanalytic => ExtremalKind::CoeffCoanalytic,
            HarmapExtremal::GrowthAnalytic => ExtremalKind::GrowthAnalytic,
            HarmapExtremal::GrowthCoanalytic => ExtremalKind::GrowthCoanalytic,
            HarmapExtremal::Theta => ExtremalKind::Theta,
        };
        *out = boxed(bounds::make_extremal(kind, n, &params(alpha, beta)?)?);
        Ok(())
    })
}

fn family(f: HarmapFamily) -> Family {
    match f {
        HarmapFamily::F1 => Family::F1,
        HarmapFamily::F2 => Family::F2,
        HarmapFamily::F3 => Family::F3,
    }
}

/// Hypergeometric construction. `truncation == 0` picks the degree automatically.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_build_hyper(
    fam: HarmapFamily,
    a: f64,
    b: f64,
    c: f64,
    alpha: f64,
    beta: f64,
    truncation: usize,
    out: *mut *mut HarmapMap,
) -> HarmapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let mut spec = ConstructionSpec::hyper(family(fam), HypergeometricParams::new(a, b, c)?, params(alpha, beta)?);
        if truncation > 0 {
            spec = spec.with_truncation(truncation);
        }
        *out = boxed(constructions::build(&spec)?);
        Ok(())
    })
}

/// Polynomial construction with `a = b = -m`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_build_poly(
    fam: HarmapFamily,
    m: u32,
    c: f64,
    alpha: f64,
    beta: f64,
    out: *mut *mut HarmapMap,
) -> HarmapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec = ConstructionSpec::poly(family(fam), m, c, params(alpha, beta)?)?;
        *out = boxed(constructions::build(&spec)?);
        Ok(())
    })
}

/// Coefficient-sum certificate. Fails with `Domain` unless the map has `g'(0) = 0`.
///
/// # Safety
/// `map` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_coefficient_margin(
    map: *const HarmapMap,
    alpha: f64,
    beta: f64,
    out: *mut HarmapCertificate,
) -> HarmapStatus {
    guard(|| {
        let c = membership::coefficient_margin(map_ref(map)?, &params(alpha, beta)?)?;
        *out_ref(out, "out")? = cert(&c);
        Ok(())
    })
}

/// Supremum of the defect on the default polar grid.
///
/// # Safety
/// `map` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_grid_sup(
    map: *const HarmapMap,
    alpha: f64,
    beta: f64,
    out: *mut HarmapCertificate,
) -> HarmapStatus {
    guard(|| {
        let c = membership::grid_sup_certificate(map_ref(map)?, &params(alpha, beta)?, &GridSpec::default());
        *out_ref(out, "out")? = cert(&c);
        Ok(())
    })
}

/// Rotation sweep over `lambda_count` unimodular factors on the default grid.
///
/// # Safety
/// `map` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_lambda_sweep(
    map: *const HarmapMap,
    alpha: f64,
    beta: f64,
    lambda_count: usize,
    out: *mut HarmapCertificate,
) -> HarmapStatus {
    guard(|| {
        let p = params(alpha, beta)?;
        let c = membership::lambda_sweep(map_ref(map)?, &p, &GridSpec::default(), lambda_count)?;
        *out_ref(out, "out")? = cert(&c);
        Ok(())
    })
}

/// Minimum Jacobian on the default grid; passes only when strictly positive.
///
/// # Safety
/// `map` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_sense_preserving(map: *const HarmapMap, out: *mut HarmapCertificate) -> HarmapStatus {
    guard(|| {
        let c = membership::sense_preserving_certificate(map_ref(map)?, &GridSpec::default());
        *out_ref(out, "out")? = cert(&c);
        Ok(())
    })
}

/// All certificates the CLI `check` command runs, as a JSON array.
///
/// # Safety
/// `map` must be a live handle; `out` receives a string for [`harmap_string_free`].
#[no_mangle]
pub unsafe extern "C" fn harmap_certificate_json(
    map: *const HarmapMap,
    alpha: f64,
    beta: f64,
    out: *mut *mut c_char,
) -> HarmapStatus {
    guard(|| {
        let f = map_ref(map)?;
        let p = params(alpha, beta)?;
        let grid = GridSpec::default();
        let mut certs = Vec::new();
        if f.is_h0() {
            certs.push(membership::coefficient_margin(f, &p)?);
        }
        certs.push(membership::grid_sup_certificate(f, &p, &grid));
        certs.push(membership::sense_preserving_certificate(f, &grid));
        let json = serde_json::to_string(&certs).map_err(Error::from)?;
        *out_ref(out, "out")? = c_string(json)?;
        Ok(())
    })
}

/// Sharp bound on the n-th coefficient, `n >= 2`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_coeff_bound(n: usize, alpha: f64, beta: f64, out: *mut f64) -> HarmapStatus {
    guard(|| {
        *out_ref(out, "out")? = bounds::coeff_bound(n, &params(alpha, beta)?)?;
        Ok(())
    })
}

/// Lower and upper bounds on `|f(z)|` at `|z| = r`. Needs `beta <= 1 + alpha`.
///
/// # Safety
/// `lower` and `upper` must be valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_growth_envelope(
    r: f64,
    alpha: f64,
    beta: f64,
    lower: *mut f64,
    upper: *mut f64,
) -> HarmapStatus {
    guard(|| {
        let e = bounds::growth_envelope(r, &params(alpha, beta)?)?;
        *out_ref(lower, "lower")? = e.lower;
        *out_ref(upper, "upper")? = e.upper;
        Ok(())
    })
}

/// `F(a, b; c; 1)`; `Divergence` when `c - a - b <= 0` and the series does not terminate.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_gauss_value(a: f64, b: f64, c: f64, out: *mut f64) -> HarmapStatus {
    guard(|| {
        *out_ref(out, "out")? = specfun::gauss_value(&HypergeometricParams::new(a, b, c)?)?;
        Ok(())
    })
}

/// Closed form of a weighted unit-point sum together with its summed oracle.
///
/// # Safety
/// `closed_form` and `oracle` must be valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_lemma_sum(
    kind: HarmapLemma,
    a: f64,
    b: f64,
    c: f64,
    closed_form: *mut f64,
    oracle: *mut f64,
) -> HarmapStatus {
    guard(|| {
        let kind = match kind {
            HarmapLemma::A => LemmaKind::A,
            HarmapLemma::B => LemmaKind::B,
            HarmapLemma::C => LemmaKind::C,
        };
        let check = specfun::lemma_sum(kind, &HypergeometricParams::new(a, b, c)?)?;
        *out_ref(closed_form, "closed_form")? = check.closed_form;
        *out_ref(oracle, "oracle")? = check.oracle_value;
        Ok(())
    })
}

/// Runs a seeded property suite (`series`, ..., `all`) and returns its JSON summary.
///
/// # Safety
/// `suite` must be a nul-terminated string; `out` and `passed` valid.
#[no_mangle]
pub unsafe extern "C" fn harmap_verify_json(
    suite: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> HarmapStatus {
    guard(|| {
        let suite: Suite = str_arg(suite, "suite")?.parse()?;
        let out = out_ref(out, "out")?;
        let passed = out_ref(passed, "passed")?;
        let summary = verify::run(suite, seed);
        let json = serde_json::to_string_pretty(&summary).map_err(Error::from)?;
        *passed = summary.passed;
        *out = c_string(json)?;
        Ok(())
    })
}
