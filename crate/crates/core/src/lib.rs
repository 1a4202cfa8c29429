//! Numerical toolkit for planar harmonic mappings `f = h + conj(g)` of the
//! unit disk whose defect `|z h'' + alpha (h' - 1)| + |z g'' + alpha g'|` is
//! bounded by `beta`.
//!
//! Membership is certified by coefficient sums and by sampled sweeps; the
//! hypergeometric constructions come with closed-form conditions that are
//! checked against brute-force series summation.

// `!(x > y)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod membership;
pub mod params;
pub mod render;
pub mod report;
pub mod series;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use params::ClassParams;
pub use series::{AnalyticSeries, GridSpec, HarmonicMap};
