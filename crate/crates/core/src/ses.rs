//! Effectiveness score (retention × compression) and the distortion gate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Heuristic default: separates the low-distortion stemmers (edit distortion
/// 0.14, 0.18) from the over-stemming one (0.26) in the reference comparison.
pub const DEFAULT_SAFETY_THRESHOLD: f64 = 0.20;

/// Largest tolerated gap between a reported score and retention × compression.
pub const CONSISTENCY_TOLERANCE: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Safe,
    Unsafe,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Safe => "safe",
            Verdict::Unsafe => "unsafe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SesResult {
    pub ses: f64,
    pub cr: f64,
    pub irs: f64,
    pub anld: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

pub fn ses(irs: f64, cr: f64) -> Result<f64> {
    if !(cr > 0.0 && cr.is_finite()) {
        return Err(Error::Precondition(format!("compression ratio must be positive, got {cr}")));
    }
    if !(-1.0..=1.0).contains(&irs) {
        return Err(Error::Precondition(format!("retention score must lie in [-1, 1], got {irs}")));
    }
    Ok(irs * cr)
}

/// Unsafe iff `anld > threshold`; equality is tolerated.
pub fn safety_gate(anld: f64, threshold: f64) -> Verdict {
    if anld > threshold {
        Verdict::Unsafe
    } else {
        Verdict::Safe
    }
}

pub fn assess(irs: f64, cr: f64, anld: f64, threshold: f64) -> Result<SesResult> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::Precondition(format!("safety threshold must be positive, got {threshold}")));
    }
    Ok(SesResult {
        ses: ses(irs, cr)?,
        cr,
        irs,
        anld,
        threshold,
        verdict: safety_gate(anld, threshold),
    })
}

/// True when a reported score disagrees with `cr × irs` beyond tolerance.
pub fn consistency_flag(cr: f64, irs: f64, reported_ses: f64) -> bool {
    (reported_ses - cr * irs).abs() > CONSISTENCY_TOLERANCE
}
