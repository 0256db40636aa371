//! Evaluatable scalar potential with gradient, polynomial- or closure-backed.

use crate::poly::{JetDecomposition, Polynomial, Rational};
use num_traits::Zero;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("potential is identically zero")]
    IdenticallyZero,
    #[error("potential does not vanish at the origin (value {0})")]
    NonzeroAtOrigin(String),
    #[error("origin is not a critical point of the potential (gradient {0})")]
    NotCritical(String),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("jet order {order} below 2")]
    JetOrderTooSmall { order: u32 },
}

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum Backing {
    Polynomial {
        poly: Polynomial,
        gradient: Vec<Polynomial>,
        radial: Polynomial,
    },
    Analytic {
        label: String,
        value: ScalarFn,
        gradient: GradientFn,
    },
}

/// The potential energy as seen by the analyzer: a float evaluator and
/// gradient, an optional exact polynomial backing, and an optional jet
/// decomposition with its order.
///
/// Construction checks that the potential vanishes at the origin and that the
/// origin is a critical point; degenerate input is rejected with a
/// diagnostic. Values are immutable and safe to share across threads.
#[derive(Clone)]
pub struct PotentialField {
    dim: usize,
    backing: Backing,
    jet_order: Option<u32>,
    jets: Option<JetDecomposition>,
}

impl PotentialField {
    /// Wraps an exact polynomial; rejects Π ≡ 0, Π(0) ≠ 0 and ∇Π(0) ≠ 0.
    pub fn from_polynomial(poly: Polynomial) -> Result<Self, FieldError> {
        let dim = poly.dim();
        if dim == 0 {
            return Err(FieldError::ZeroDimension);
        }
        if poly.is_zero() {
            return Err(FieldError::IdenticallyZero);
        }
        let constant = poly.homogeneous_part(0);
        if !constant.is_zero() {
            let v = constant.eval_exact(&vec![Rational::zero(); dim]).unwrap();
            return Err(FieldError::NonzeroAtOrigin(v.to_string()));
        }
        let linear = poly.homogeneous_part(1);
        if !linear.is_zero() {
            return Err(FieldError::NotCritical(linear.to_string()));
        }
        let gradient = poly.gradient();
        let radial = poly.radial_derivative();
        Ok(PotentialField {
            dim,
            backing: Backing::Polynomial { poly, gradient, radial },
            jet_order: None,
            jets: None,
        })
    }

    /// Wraps closure evaluators (for potentials that are not polynomial,
    /// e.g. flat catalog entries); checks the origin numerically.
    pub fn analytic(
        dim: usize,
        label: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self, FieldError> {
        if dim == 0 {
            return Err(FieldError::ZeroDimension);
        }
        let origin = vec![0.0; dim];
        let v0 = value(&origin);
        if v0.abs() > 1e-12 {
            return Err(FieldError::NonzeroAtOrigin(format!("{v0:e}")));
        }
        let g0 = gradient(&origin);
        let gn = g0.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gn > 1e-12 {
            return Err(FieldError::NotCritical(format!("norm {gn:e}")));
        }
        Ok(PotentialField {
            dim,
            backing: Backing::Analytic {
                label: label.into(),
                value: Arc::new(value),
                gradient: Arc::new(gradient),
            },
            jet_order: None,
            jets: None,
        })
    }

    /// Attaches the jet decomposition of order `s` (polynomial-backed only).
    pub fn with_jet_order(mut self, s: u32) -> Result<Self, FieldError> {
        if s < 2 {
            return Err(FieldError::JetOrderTooSmall { order: s });
        }
        if let Backing::Polynomial { poly, .. } = &self.backing {
            self.jets = Some(poly.homogeneous_parts(s));
            self.jet_order = Some(s);
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jet_order(&self) -> Option<u32> {
        self.jet_order
    }

    pub fn jets(&self) -> Option<&JetDecomposition> {
        self.jets.as_ref()
    }

    pub fn polynomial(&self) -> Option<&Polynomial> {
        match &self.backing {
            Backing::Polynomial { poly, .. } => Some(poly),
            Backing::Analytic { .. } => None,
        }
    }

    /// Exact radial derivative `R_Π`, when polynomial-backed.
    pub fn radial_polynomial(&self) -> Option<&Polynomial> {
        match &self.backing {
            Backing::Polynomial { radial, .. } => Some(radial),
            Backing::Analytic { .. } => None,
        }
    }

    /// Π(q) in double precision.
    pub fn value(&self, q: &[f64]) -> f64 {
        debug_assert_eq!(q.len(), self.dim);
        match &self.backing {
            Backing::Polynomial { poly, .. } => poly.eval_f64(q).expect("dimension checked"),
            Backing::Analytic { value, .. } => value(q),
        }
    }

    /// Π(q) together with a rounding-noise bound (0 for closure backings,
    /// which are assumed well-scaled).
    pub fn value_with_bound(&self, q: &[f64]) -> (f64, f64) {
        match &self.backing {
            Backing::Polynomial { poly, .. } => {
                poly.eval_f64_with_bound(q).expect("dimension checked")
            }
            Backing::Analytic { value, .. } => (value(q), 0.0),
        }
    }

    /// ∇Π(q) in double precision.
    pub fn gradient(&self, q: &[f64]) -> Vec<f64> {
        debug_assert_eq!(q.len(), self.dim);
        match &self.backing {
            Backing::Polynomial { gradient, .. } => gradient
                .iter()
                .map(|g| g.eval_f64(q).expect("dimension checked"))
                .collect(),
            Backing::Analytic { gradient, .. } => gradient(q),
        }
    }

    /// Radial derivative `R_Π(q) = <∇Π(q), q>` in double precision.
    pub fn radial(&self, q: &[f64]) -> f64 {
        match &self.backing {
            Backing::Polynomial { radial, .. } => radial.eval_f64(q).expect("dimension checked"),
            Backing::Analytic { .. } => self
                .gradient(q)
                .iter()
                .zip(q)
                .map(|(g, x)| g * x)
                .sum(),
        }
    }

    pub fn radial_with_bound(&self, q: &[f64]) -> (f64, f64) {
        match &self.backing {
            Backing::Polynomial { radial, .. } => {
                radial.eval_f64_with_bound(q).expect("dimension checked")
            }
            Backing::Analytic { .. } => (self.radial(q), 0.0),
        }
    }

    /// Exact sign of Π at a float point, when polynomial-backed.
    pub fn exact_value_sign(&self, q: &[f64]) -> Option<i8> {
        self.polynomial().and_then(|p| p.sign_at_f64(q))
    }

    /// Exact sign of `R_Π` at a float point, when polynomial-backed.
    pub fn exact_radial_sign(&self, q: &[f64]) -> Option<i8> {
        self.radial_polynomial().and_then(|p| p.sign_at_f64(q))
    }

    pub fn label(&self) -> String {
        match &self.backing {
            Backing::Polynomial { poly, .. } => poly.to_string(),
            Backing::Analytic { label, .. } => label.clone(),
        }
    }

    /// Highest degree of the exact backing, used to scale zero bands; falls
    /// back to 2 for closure-backed fields.
    pub fn norm_degree(&self) -> u32 {
        self.jet_order.unwrap_or_else(|| {
            self.polynomial().map(Polynomial::degree).unwrap_or(2).max(2)
        })
    }
}

impl fmt::Debug for PotentialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PotentialField[dim {}]({})", self.dim, self.label())
    }
}
