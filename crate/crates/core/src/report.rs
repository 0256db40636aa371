//! Report primitives shared by the analysis, dynamics and corpus layers.
//!
//! Everything that leaves the library as a document serializes through serde
//! with struct-order (stable) keys, so two runs with the same inputs produce
//! byte-identical output once the optional timestamp is suppressed.

use serde::Serialize;
use std::fmt;

/// Three-valued verdict of a sampling-based check.
///
/// Sampling can refute with a concrete witness; it can certify only up to the
/// stated margin and density; anything else stays inconclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "Certified",
            Verdict::Refuted => "Refuted",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// A concrete point backing a refutation (or flagged anomaly).
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// Coordinates of the sample point.
    pub point: Vec<f64>,
    /// Sphere radius the point was sampled at.
    pub radius: f64,
    /// Which quantity was evaluated (e.g. "j8", "R12", "Pi", "R_Pi").
    pub quantity: String,
    /// Floating-point value observed.
    pub value: f64,
    /// Sign re-derived in exact rational arithmetic when a backing
    /// polynomial exists (+1 / 0 / -1).
    pub exact_sign: Option<i8>,
    /// "interior" for points labeled inside the region, "closure-ring" for
    /// the one-ring closure over-approximation.
    pub kind: String,
}

/// Outcome of a single hypothesis check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    /// Worst certified margin (normalized by the radius power), when meaningful.
    pub margin: Option<f64>,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl CheckOutcome {
    pub fn certified(margin: f64) -> Self {
        CheckOutcome { verdict: Verdict::Certified, margin: Some(margin), witnesses: vec![], notes: vec![] }
    }

    pub fn refuted(witnesses: Vec<Witness>) -> Self {
        CheckOutcome { verdict: Verdict::Refuted, margin: None, witnesses, notes: vec![] }
    }

    pub fn inconclusive(note: impl Into<String>) -> Self {
        CheckOutcome {
            verdict: Verdict::Inconclusive,
            margin: None,
            witnesses: vec![],
            notes: vec![note.into()],
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Pretty JSON with a trailing newline; key order follows struct field order.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// Seconds since the Unix epoch, for the optional report timestamp.
pub fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
