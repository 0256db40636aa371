//! Sampling-based verification of the jet instability hypotheses.
//!
//! The checks discretize small spheres around the equilibrium, label the
//! signs of the jet (or the full potential) and of the radial derivative,
//! build connected components of the negative set on the sample's neighbor
//! graph, and certify or refute each hypothesis up to the stated margins.
//! Witnesses backing a refutation are re-evaluated in exact rational
//! arithmetic whenever the field is polynomial-backed.

mod hypotheses;
mod potential;
mod regions;
mod sampling;
mod wregion;

pub use hypotheses::{
    analyze, check_h1, check_h2, check_h3, check_strict_cetaev, find_tangent_directions,
    AnalysisError, HypothesisReport, StrictCetaevOutcome, TangentDirection, TangentDirectionSet,
    TangentSummary,
};
pub use potential::{FieldError, PotentialField};
pub use regions::{label_field_regions, label_jet_regions, RadiusLabeling, RegionLabeling, SignClass};
pub use sampling::SphereSample;
pub use wregion::{build_w_region, verify_sandwich, SandwichRadius, SandwichReport};

use serde::Serialize;

/// Tunable parameters of the sampling analysis, echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisParams {
    /// Band half-width for treating a sampled value as "zero" (scaled by
    /// `r^deg`); near-zero values escalate to exact arithmetic when possible.
    pub zero_tol: f64,
    /// How negative the top homogeneous part must be along a tangent
    /// direction, and the floor for declaring a jet positive-definite.
    pub neg_margin: f64,
    /// Certification margin for the radial derivative on the closure ring,
    /// normalized by `r^s`.
    pub eta: f64,
    /// Sphere sample size in dimension 2 (uniform angles).
    pub samples_dim2: usize,
    /// Sphere sample size in dimension >= 3 (deterministic quasi-random).
    pub samples_highdim: usize,
    /// Neighbors per point in the adjacency graph.
    pub neighbors: usize,
    /// Number of radius halvings for region labeling: radii `eps * 2^-j`,
    /// `j = 0..radius_levels`.
    pub radius_levels: usize,
    /// Cap on projected-descent refinement steps per tangent candidate.
    pub descent_steps: usize,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            zero_tol: 1e-9,
            neg_margin: 1e-6,
            eta: 1e-6,
            samples_dim2: 4096,
            samples_highdim: 20000,
            neighbors: 8,
            radius_levels: 5,
            descent_steps: 200,
        }
    }
}
