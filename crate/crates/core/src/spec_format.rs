//! The potential-spec text format: a line-oriented document carrying the
//! dimension, variable names, exact polynomial terms, and an optional
//! kinetic-matrix block. Rational coefficients are written as integer
//! numerator/denominator pairs, so the format round-trips exactly.
//!
//! ```text
//! # worked example potential
//! dim 2
//! vars x y
//! term 8 3 0 6        # (8/3) y^6: numerator denominator exponents...
//! term -1 12 12 0
//! B 1 0               # optional kinetic rows, defaults to the identity
//! B 0 1
//! ```

use crate::poly::{Polynomial, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpecFormatError {
    #[error("line {line}: unknown directive '{word}'")]
    UnknownDirective { line: usize, word: String },
    #[error("line {line}: malformed integer '{token}'")]
    MalformedInteger { line: usize, token: String },
    #[error("line {line}: malformed number '{token}'")]
    MalformedNumber { line: usize, token: String },
    #[error("line {line}: denominator must be positive")]
    NonPositiveDenominator { line: usize },
    #[error("line {line}: expected {expected} exponents, found {found}")]
    ExponentCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: {what} before 'dim'")]
    BeforeDim { line: usize, what: &'static str },
    #[error("line {line}: duplicate 'dim' directive")]
    DuplicateDim { line: usize },
    #[error("line {line}: dimension must be a positive integer")]
    BadDimension { line: usize },
    #[error("line {line}: expected {expected} variable names, found {found}")]
    VariableCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: kinetic row has {found} entries, expected {expected}")]
    KineticRowLength { line: usize, expected: usize, found: usize },
    #[error("kinetic block has {found} rows, expected {expected}")]
    KineticRowCount { expected: usize, found: usize },
    #[error("document has no 'dim' directive")]
    MissingDim,
    #[error("document has no terms")]
    NoTerms,
}

/// A parsed potential document.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    pub dimension: usize,
    pub variables: Vec<String>,
    pub polynomial: Polynomial,
    /// Kinetic matrix rows when a `B` block is present; positive
    /// definiteness is validated where the matrix is consumed.
    pub kinetic: Option<Vec<Vec<f64>>>,
}

impl PotentialSpec {
    /// Wraps a polynomial with default variable names and no kinetic block.
    pub fn from_polynomial(polynomial: Polynomial) -> Self {
        let dimension = polynomial.dim();
        PotentialSpec {
            dimension,
            variables: default_variables(dimension),
            polynomial,
            kinetic: None,
        }
    }
}

fn default_variables(dim: usize) -> Vec<String> {
    match dim {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        n => (1..=n).map(|i| format!("q{i}")).collect(),
    }
}

pub fn parse_potential_spec(text: &str) -> Result<PotentialSpec, SpecFormatError> {
    let mut dimension: Option<usize> = None;
    let mut variables: Option<Vec<String>> = None;
    let mut terms: Vec<(Vec<u32>, Rational)> = Vec::new();
    let mut kinetic_rows: Vec<Vec<f64>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let word = tokens.next().expect("nonempty");
        let rest: Vec<&str> = tokens.collect();
        match word {
            "dim" => {
                if dimension.is_some() {
                    return Err(SpecFormatError::DuplicateDim { line });
                }
                let d: usize = rest
                    .first()
                    .and_then(|t| t.parse().ok())
                    .ok_or(SpecFormatError::BadDimension { line })?;
                if d == 0 || rest.len() != 1 {
                    return Err(SpecFormatError::BadDimension { line });
                }
                dimension = Some(d);
            }
            "vars" => {
                let dim = dimension.ok_or(SpecFormatError::BeforeDim { line, what: "vars" })?;
                if rest.len() != dim {
                    return Err(SpecFormatError::VariableCount {
                        line,
                        expected: dim,
                        found: rest.len(),
                    });
                }
                variables = Some(rest.iter().map(|s| s.to_string()).collect());
            }
            "term" => {
                let dim = dimension.ok_or(SpecFormatError::BeforeDim { line, what: "term" })?;
                if rest.len() != dim + 2 {
                    return Err(SpecFormatError::ExponentCount {
                        line,
                        expected: dim,
                        found: rest.len().saturating_sub(2),
                    });
                }
                let numer = BigInt::from_str(rest[0]).map_err(|_| {
                    SpecFormatError::MalformedInteger { line, token: rest[0].to_string() }
                })?;
                let denom = BigInt::from_str(rest[1]).map_err(|_| {
                    SpecFormatError::MalformedInteger { line, token: rest[1].to_string() }
                })?;
                if !denom.is_positive() {
                    return Err(SpecFormatError::NonPositiveDenominator { line });
                }
                let mut exps = Vec::with_capacity(dim);
                for tok in &rest[2..] {
                    let e: u32 = tok.parse().map_err(|_| SpecFormatError::MalformedInteger {
                        line,
                        token: tok.to_string(),
                    })?;
                    exps.push(e);
                }
                if !numer.is_zero() {
                    terms.push((exps, Rational::new(numer, denom)));
                }
            }
            "B" => {
                let dim = dimension.ok_or(SpecFormatError::BeforeDim { line, what: "B" })?;
                if rest.len() != dim {
                    return Err(SpecFormatError::KineticRowLength {
                        line,
                        expected: dim,
                        found: rest.len(),
                    });
                }
                let mut row = Vec::with_capacity(dim);
                for tok in &rest {
                    let v: f64 = tok.parse().map_err(|_| SpecFormatError::MalformedNumber {
                        line,
                        token: tok.to_string(),
                    })?;
                    row.push(v);
                }
                kinetic_rows.push(row);
            }
            other => {
                return Err(SpecFormatError::UnknownDirective { line, word: other.to_string() })
            }
        }
    }

    let dimension = dimension.ok_or(SpecFormatError::MissingDim)?;
    if terms.is_empty() {
        return Err(SpecFormatError::NoTerms);
    }
    let polynomial = Polynomial::from_terms(dimension, terms).expect("lengths checked");
    let kinetic = if kinetic_rows.is_empty() {
        None
    } else {
        if kinetic_rows.len() != dimension {
            return Err(SpecFormatError::KineticRowCount {
                expected: dimension,
                found: kinetic_rows.len(),
            });
        }
        Some(kinetic_rows)
    };
    Ok(PotentialSpec {
        dimension,
        variables: variables.unwrap_or_else(|| default_variables(dimension)),
        polynomial,
        kinetic,
    })
}

pub fn format_potential_spec(spec: &PotentialSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("dim {}\n", spec.dimension));
    out.push_str(&format!("vars {}\n", spec.variables.join(" ")));
    for (mono, coeff) in spec.polynomial.terms() {
        out.push_str(&format!("term {} {}", coeff.numer(), coeff.denom()));
        for e in mono.exponents() {
            out.push_str(&format!(" {e}"));
        }
        out.push('\n');
    }
    if let Some(rows) = &spec.kinetic {
        for row in rows {
            out.push('B');
            for v in row {
                out.push_str(&format!(" {v:?}"));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    #[test]
    fn parses_counterexample_spec() {
        let text = "# counterexample\n\
                    dim 2\n\
                    vars x y\n\
                    term 1 1 0 2\n\
                    term -1 1 2 0\n\
                    term 1 1 3 0\n";
        let spec = parse_potential_spec(text).unwrap();
        assert_eq!(spec.dimension, 2);
        assert_eq!(spec.variables, vec!["x", "y"]);
        assert_eq!(spec.polynomial.num_terms(), 3);
        assert!(spec.kinetic.is_none());
        let expect = Polynomial::from_terms(
            2,
            vec![(vec![0, 2], int(1)), (vec![2, 0], int(-1)), (vec![3, 0], int(1))],
        )
        .unwrap();
        assert_eq!(spec.polynomial, expect);
    }

    #[test]
    fn accepts_kinetic_block() {
        let text = "dim 2\nterm 1 1 2 0\nterm 1 1 0 2\nB 2 0\nB 0 1\n";
        let spec = parse_potential_spec(text).unwrap();
        assert_eq!(spec.kinetic, Some(vec![vec![2.0, 0.0], vec![0.0, 1.0]]));
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let bad = "dim 2\nterm 1 0 1 0\n";
        assert_eq!(
            parse_potential_spec(bad).unwrap_err(),
            SpecFormatError::NonPositiveDenominator { line: 2 }
        );
        let bad = "dim 2\nterm 1 2 1\n";
        assert_eq!(
            parse_potential_spec(bad).unwrap_err(),
            SpecFormatError::ExponentCount { line: 2, expected: 2, found: 1 }
        );
        let bad = "term 1 1 0\n";
        assert_eq!(
            parse_potential_spec(bad).unwrap_err(),
            SpecFormatError::BeforeDim { line: 1, what: "term" }
        );
        let bad = "dim 2\nfoo 1\n";
        assert!(matches!(
            parse_potential_spec(bad).unwrap_err(),
            SpecFormatError::UnknownDirective { line: 2, .. }
        ));
    }

    #[test]
    fn round_trip_is_exact() {
        let poly = Polynomial::from_terms(
            2,
            vec![
                (vec![0, 6], rat(8, 3)),
                (vec![4, 4], int(-3)),
                (vec![8, 2], rat(9, 10)),
                (vec![12, 0], rat(-1, 12)),
                (vec![0, 12], int(-1)),
                (vec![14, 0], int(1)),
            ],
        )
        .unwrap();
        let mut spec = PotentialSpec::from_polynomial(poly.clone());
        spec.kinetic = Some(vec![vec![1.5, 0.25], vec![0.25, 2.0]]);
        let text = format_potential_spec(&spec);
        let back = parse_potential_spec(&text).unwrap();
        assert_eq!(back.polynomial, poly);
        assert_eq!(back, spec);
    }
}
