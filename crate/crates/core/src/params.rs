//! The parameter pair `(alpha, beta)` and the regime thresholds inherited
//! from the analytic class `|z f'' + alpha (f' - 1)| < beta`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Absolute tolerance for threshold comparisons; a value exactly at a threshold is inside.
pub const THRESHOLD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ClassParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for ClassParams {
    type Error = crate::Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.alpha, raw.beta)
    }
}

impl ClassParams {
    /// Requires `alpha > -1` and `beta > 0`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return domain(format!("alpha must exceed -1, got {alpha}"));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return domain(format!("beta must be positive, got {beta}"));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// True when `beta <= 1 + alpha`, the range where the class is close-to-convex.
    pub fn is_close_to_convex_range(&self) -> bool {
        self.beta <= 1.0 + self.alpha + THRESHOLD_TOL
    }
}

/// Which reading of a printed threshold formula to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaMode {
    /// The formula exactly as printed in the source literature.
    Literal,
    /// The reading that is continuous across branch boundaries.
    #[default]
    Continuous,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > -1.0) {
        return domain(format!("alpha must exceed -1, got {alpha}"));
    }
    Ok(())
}

pub fn beta_max_close_to_convex(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(1.0 + alpha)
}

/// Breakpoints of the convexity threshold: `sqrt5 - 2`, `1`, `2/(sqrt5 - 1)`, `2`.
pub fn convex_breakpoints() -> [f64; 4] {
    let s5 = 5f64.sqrt();
    [s5 - 2.0, 1.0, 2.0 / (s5 - 1.0), 2.0]
}

/// Value of one branch of the convexity threshold (branch index 0..5).
pub fn convex_branch(branch: usize, alpha: f64, mode: FormulaMode) -> f64 {
    let s5 = 5f64.sqrt();
    match branch {
        0 => match mode {
            FormulaMode::Literal => (1.0 - alpha) / (2.0 + alpha),
            FormulaMode::Continuous => (1.0 + alpha) / (2.0 + alpha),
        },
        1 => (1.0 + alpha) / s5,
        2 => (1.0 + alpha) / (alpha * s5),
        3 => (1.0 + alpha) / (2.0 + alpha),
        _ => (1.0 + alpha) / (2.0 * alpha),
    }
}

/// Largest `beta` for which members of the analytic class are convex.
///
/// The first branch is printed as `(1 - alpha)/(2 + alpha)`, which jumps at
/// `sqrt5 - 2` and exceeds `1 + alpha` near `alpha = -1`; the continuous mode
/// uses `(1 + alpha)/(2 + alpha)`, which agrees with it at `alpha = 0`.
pub fn beta_max_convex(alpha: f64, mode: FormulaMode) -> Result<f64> {
    check_alpha(alpha)?;
    let bp = convex_breakpoints();
    let branch = bp.iter().position(|&b| alpha <= b).unwrap_or(4);
    Ok(convex_branch(branch, alpha, mode))
}

/// Largest `beta` for which members of the analytic class are starlike, or
/// `None` for `alpha <= 0` where the formula has no real value.
///
/// At `alpha = 1` the value is `4e^2/(1 + e^2)`. For `alpha != 1` the printed
/// formula is `2(1+alpha)/(2 + alpha^(2/(1-alpha)))`; its limit at `alpha -> 1`
/// is `4/(2 + e^-2)`, not the `alpha = 1` value, so the continuous mode uses
/// `2(1+alpha)/(1 + alpha^(2/(1-alpha)))` instead.
pub fn beta_max_starlike(alpha: f64, mode: FormulaMode) -> Option<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return None;
    }
    if alpha == 1.0 {
        let e2 = 2f64.exp();
        return Some(4.0 * e2 / (1.0 + e2));
    }
    let power = (2.0 * alpha.ln() / (1.0 - alpha)).exp();
    let offset = match mode {
        FormulaMode::Literal => 2.0,
        FormulaMode::Continuous => 1.0,
    };
    Some(2.0 * (1.0 + alpha) / (offset + power))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub close_to_convex: f64,
    pub convex: f64,
    pub starlike: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub alpha: f64,
    pub beta: f64,
    pub mode: FormulaMode,
    pub threshold: Thresholds,
    pub close_to_convex: bool,
    pub convex: bool,
    /// `None` when the starlike threshold is unknown.
    pub starlike: Option<bool>,
    pub notes: Vec<String>,
}

pub fn classify(p: &ClassParams, mode: FormulaMode) -> RegimeReport {
    let (alpha, beta) = (p.alpha, p.beta);
    let threshold = Thresholds {
        close_to_convex: 1.0 + alpha,
        convex: beta_max_convex(alpha, mode).expect("alpha validated"),
        starlike: beta_max_starlike(alpha, mode),
    };
    let inside = |t: f64| beta <= t + THRESHOLD_TOL;
    let mut notes = Vec::new();
    match mode {
        FormulaMode::Continuous => {
            if alpha <= convex_breakpoints()[0] {
                notes.push(
                    "convex threshold uses (1+alpha)/(2+alpha) on the first branch; the printed (1-alpha)/(2+alpha) is discontinuous at sqrt(5)-2"
                        .into(),
                );
            }
            if threshold.starlike.is_some() && alpha != 1.0 {
                notes.push(
                    "starlike threshold uses denominator 1+alpha^(2/(1-alpha)) for continuity with the alpha=1 value; the printed form has 2+"
                        .into(),
                );
            }
        }
        FormulaMode::Literal => {
            if alpha <= convex_breakpoints()[0] || (threshold.starlike.is_some() && alpha != 1.0) {
                notes.push("literal thresholds as printed; they are discontinuous at sqrt(5)-2 and at alpha=1".into());
            }
        }
    }
    if threshold.starlike.is_none() {
        notes.push("starlike threshold unknown for alpha <= 0".into());
    }
    RegimeReport {
        alpha,
        beta,
        mode,
        close_to_convex: inside(threshold.close_to_convex),
        convex: inside(threshold.convex),
        starlike: threshold.starlike.map(inside),
        threshold,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(ClassParams::new(-1.0, 1.0).is_err());
        assert!(ClassParams::new(0.0, 0.0).is_err());
        assert!(ClassParams::new(f64::NAN, 1.0).is_err());
        assert!(ClassParams::new(-0.999, 1e-9).is_ok());
        assert!(serde_json::from_str::<ClassParams>(r#"{"alpha":-2,"beta":1}"#).is_err());
    }

    #[test]
    fn close_to_convex_threshold() {
        assert_eq!(beta_max_close_to_convex(0.0).unwrap(), 1.0);
        assert_eq!(beta_max_close_to_convex(1.0).unwrap(), 2.0);
        let v = beta_max_close_to_convex(-1.0 + 1e-9).unwrap();
        assert!((v - 1e-9).abs() < 1e-15);
        assert!(beta_max_close_to_convex(-1.0).is_err());
    }

    #[test]
    fn convex_threshold_values() {
        for mode in [FormulaMode::Literal, FormulaMode::Continuous] {
            assert_eq!(beta_max_convex(0.0, mode).unwrap(), 0.5);
        }
        let m = FormulaMode::Continuous;
        let two_over_root5 = 2.0 / 5f64.sqrt();
        assert!((beta_max_convex(1.0, m).unwrap() - two_over_root5).abs() < 1e-15);
        assert!((convex_branch(2, 1.0, m) - two_over_root5).abs() < 1e-15);
        assert!((beta_max_convex(2.0, m).unwrap() - 0.75).abs() < 1e-15);
        assert!((convex_branch(4, 2.0, m) - 0.75).abs() < 1e-15);
        assert!(beta_max_convex(-1.5, m).is_err());
    }

    #[test]
    fn convex_threshold_continuity() {
        let bp = convex_breakpoints();
        for (i, &b) in bp.iter().enumerate() {
            let gap =
                (convex_branch(i, b, FormulaMode::Continuous) - convex_branch(i + 1, b, FormulaMode::Continuous)).abs();
            assert!(gap <= 1e-12, "breakpoint {i}: gap {gap}");
        }
        // the printed first branch does not join the second one
        let gap = (convex_branch(0, bp[0], FormulaMode::Literal) - convex_branch(1, bp[0], FormulaMode::Literal)).abs();
        assert!(gap > 0.2);
    }

    #[test]
    fn close_to_convex_dominates_convex() {
        for k in 1..=1100 {
            let alpha = -1.0 + k as f64 * 0.01;
            let c = beta_max_close_to_convex(alpha).unwrap();
            assert!(c >= beta_max_convex(alpha, FormulaMode::Continuous).unwrap());
        }
    }

    #[test]
    fn starlike_threshold() {
        let e2 = 2f64.exp();
        let at_one = 4.0 * e2 / (1.0 + e2);
        assert!((at_one - 3.5232).abs() < 1e-4);
        assert_eq!(beta_max_starlike(1.0, FormulaMode::Literal), Some(at_one));
        let lit = beta_max_starlike(2.0, FormulaMode::Literal).unwrap();
        assert!((lit - 6.0 / 2.25).abs() < 1e-14);
        let near = beta_max_starlike(1.0 + 1e-7, FormulaMode::Continuous).unwrap();
        assert!((near - 4.0 / (1.0 + (-2f64).exp())).abs() < 1e-6);
        let near_lit = beta_max_starlike(1.0 + 1e-7, FormulaMode::Literal).unwrap();
        assert!((near_lit - 4.0 / (2.0 + (-2f64).exp())).abs() < 1e-6);
        assert_eq!(beta_max_starlike(0.0, FormulaMode::Continuous), None);
        assert_eq!(beta_max_starlike(-0.5, FormulaMode::Literal), None);
    }

    #[test]
    fn classify_examples() {
        let r = classify(&ClassParams::new(0.0, 0.4).unwrap(), FormulaMode::Continuous);
        assert!(r.close_to_convex && r.convex);
        assert_eq!(r.starlike, None);
        let r = classify(&ClassParams::new(0.0, 1.0).unwrap(), FormulaMode::Continuous);
        assert!(r.close_to_convex && !r.convex);
        let r = classify(&ClassParams::new(0.0, 2.0).unwrap(), FormulaMode::Literal);
        assert!(!r.close_to_convex && !r.convex);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["mode"], "literal");
        assert!(json["threshold"]["starlike"].is_null());
    }

    #[test]
    fn classify_is_monotone_in_beta() {
        for a in 0..40 {
            let alpha = -0.95 + a as f64 * 0.15;
            let mut prev: Option<RegimeReport> = None;
            for b in 1..200 {
                let r = classify(&ClassParams::new(alpha, b as f64 * 0.03).unwrap(), FormulaMode::Continuous);
                if let Some(p) = &prev {
                    assert!(p.close_to_convex || !r.close_to_convex);
                    assert!(p.convex || !r.convex);
                    assert!(p.starlike != Some(false) || r.starlike == Some(false));
                }
                prev = Some(r);
            }
        }
    }
}
