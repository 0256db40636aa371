//! Built-in catalog of potentials with expected verdicts, plus the exact
//! verification of the published worked example.

mod verify;

pub use verify::{verify_item, verify_paper_example, PaperVerification, VerifyItem};

use crate::analysis::{FieldError, PotentialField};
use crate::poly::{int, rat, Polynomial};
use serde::Serialize;

/// Canonical constructors for the catalog polynomials.
pub mod polys {
    use super::*;

    /// `f(x,y) = 8/3 y⁶ − 3y⁴x⁴ + 9/10 y²x⁸ − 1/12 x¹² − y¹²`.
    pub fn example_f() -> Polynomial {
        Polynomial::from_terms(
            2,
            vec![
                (vec![0, 6], rat(8, 3)),
                (vec![4, 4], int(-3)),
                (vec![8, 2], rat(9, 10)),
                (vec![12, 0], rat(-1, 12)),
                (vec![0, 12], int(-1)),
            ],
        )
        .expect("static terms")
    }

    /// The worked-example potential `π = f + x¹⁴`.
    pub fn example_pi() -> Polynomial {
        example_f()
            .try_add(&Polynomial::term(2, &[14, 0], int(1)))
            .expect("same dimension")
    }

    /// `h(λ) = 8/3 λ⁶ − 3λ⁴ + 9/10 λ² − 1/12`, the profile of `f` on the
    /// parabola family `y = λx²` (coefficient of `x¹²`).
    pub fn h_lambda() -> Polynomial {
        Polynomial::from_terms(
            1,
            vec![
                (vec![6], rat(8, 3)),
                (vec![4], int(-3)),
                (vec![2], rat(9, 10)),
                (vec![0], rat(-1, 12)),
            ],
        )
        .expect("static terms")
    }

    /// The factored auxiliary polynomial `(y−x²)(y+x²)(2y−x²)²(2y+x²)²`.
    pub fn q_factored() -> Polynomial {
        let y = Polynomial::var(2, 1);
        let x2 = Polynomial::term(2, &[2, 0], int(1));
        let a = y.try_sub(&x2).unwrap();
        let b = y.try_add(&x2).unwrap();
        let c = y.scale(&int(2)).try_sub(&x2).unwrap();
        let d = y.scale(&int(2)).try_add(&x2).unwrap();
        a.try_mul(&b).unwrap().try_mul(&c.pow(2)).unwrap().try_mul(&d.pow(2)).unwrap()
    }

    /// `y² − x² + x³`: the jet satisfies the radial-derivative condition but
    /// the potential itself does not.
    pub fn counterexample() -> Polynomial {
        Polynomial::from_terms(
            2,
            vec![(vec![0, 2], int(1)), (vec![2, 0], int(-1)), (vec![3, 0], int(1))],
        )
        .expect("static terms")
    }

    /// `−(x⁴ + y⁴)`: negative definite top jet, every hypothesis certified.
    pub fn quartic_well() -> Polynomial {
        Polynomial::from_terms(2, vec![(vec![4, 0], int(-1)), (vec![0, 4], int(-1))])
            .expect("static terms")
    }

    /// `y² − x⁴`: degenerate saddle with nonnegative lower jets.
    pub fn quartic_saddle() -> Polynomial {
        Polynomial::from_terms(2, vec![(vec![0, 2], int(1)), (vec![4, 0], int(-1))])
            .expect("static terms")
    }

    /// `x⁴ − y⁴ + y⁶`: negative jet region along the y-axis whose closure
    /// touches the zero set of the radial derivative on the diagonals.
    pub fn quartic_mixed() -> Polynomial {
        Polynomial::from_terms(
            2,
            vec![(vec![4, 0], int(1)), (vec![0, 4], int(-1)), (vec![0, 6], int(1))],
        )
        .expect("static terms")
    }

    /// `−x⁴/4` in one degree of freedom: the flow `ẍ = x³` with the
    /// closed-form escaping family `x(t) = √2/(c − t)`.
    pub fn cubic_1d() -> Polynomial {
        Polynomial::term(1, &[4], rat(-1, 4))
    }
}

/// Expected verdict of one hypothesis for a catalog entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Expected {
    Certified,
    Refuted,
    Inconclusive,
    /// Entry exists for demonstration only and is exempt from matching.
    DemonstrationOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrajectoryExpectation {
    Found,
    Refused,
    DemonstrationOnly,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExpectedVerdicts {
    pub h1: Expected,
    pub h2: Expected,
    pub h3: Expected,
    pub strict_cetaev: Expected,
    pub trajectory: TrajectoryExpectation,
}

#[derive(Clone, Copy, Debug)]
enum Backing {
    Poly(fn() -> Polynomial),
    Painleve,
}

/// One catalog potential with its suggested analysis parameters and the
/// verdicts the analyzer is expected to reproduce.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub provenance: &'static str,
    pub dim: usize,
    pub suggested_s: Option<u32>,
    pub suggested_eps: f64,
    pub expected: ExpectedVerdicts,
    backing: Backing,
}

impl CorpusEntry {
    /// Builds the evaluatable field, attaching the jet decomposition at the
    /// suggested order for polynomial entries.
    pub fn field(&self) -> Result<PotentialField, FieldError> {
        match self.backing {
            Backing::Poly(make) => {
                let field = PotentialField::from_polynomial(make())?;
                match self.suggested_s {
                    Some(s) => field.with_jet_order(s),
                    None => Ok(field),
                }
            }
            Backing::Painleve => PotentialField::analytic(
                1,
                "exp(-1/x^2)*sin(1/x)",
                |q| {
                    let x = q[0];
                    if x == 0.0 {
                        0.0
                    } else {
                        (-1.0 / (x * x)).exp() * (1.0 / x).sin()
                    }
                },
                |q| {
                    let x = q[0];
                    if x == 0.0 {
                        vec![0.0]
                    } else {
                        let e = (-1.0 / (x * x)).exp();
                        let inv = 1.0 / x;
                        vec![e * (2.0 * inv.powi(3) * inv.sin() - inv.powi(2) * inv.cos())]
                    }
                },
            ),
        }
    }

    /// The exact polynomial behind the entry, when there is one.
    pub fn polynomial(&self) -> Option<Polynomial> {
        match self.backing {
            Backing::Poly(make) => Some(make()),
            Backing::Painleve => None,
        }
    }
}

/// The analysis radius pinned for the worked example: `(29/60)^(1/12)`.
pub fn paper_example_eps() -> f64 {
    (29.0f64 / 60.0).powf(1.0 / 12.0)
}

/// The built-in catalog.
pub fn catalog() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry {
            name: "paper-example",
            summary: "x^14 perturbation of a degree-12 jet: jet hypotheses certify containment but the full potential fails the strict radial condition",
            provenance: "worked example of the accompanying article",
            dim: 2,
            suggested_s: Some(12),
            suggested_eps: paper_example_eps(),
            expected: ExpectedVerdicts {
                h1: Expected::Refuted,
                h2: Expected::Certified,
                h3: Expected::Certified,
                strict_cetaev: Expected::Refuted,
                trajectory: TrajectoryExpectation::Refused,
            },
            backing: Backing::Poly(polys::example_pi),
        },
        CorpusEntry {
            name: "cubic-counterexample",
            summary: "y^2 - x^2 + x^3: the order-2 jet satisfies the radial condition, the potential does not",
            provenance: "counterexample from the accompanying article's hypothesis discussion",
            dim: 2,
            suggested_s: Some(2),
            suggested_eps: 0.5,
            expected: ExpectedVerdicts {
                h1: Expected::Certified,
                h2: Expected::Certified,
                h3: Expected::Refuted,
                strict_cetaev: Expected::Refuted,
                trajectory: TrajectoryExpectation::Refused,
            },
            backing: Backing::Poly(polys::counterexample),
        },
        CorpusEntry {
            name: "painleve",
            summary: "exp(-1/x^2)*sin(1/x): flat, stable equilibrium without a minimum; demonstrates that instability needs more than 'no minimum'",
            provenance: "Painleve's classical example (demonstration only, no polynomial jet)",
            dim: 1,
            suggested_s: None,
            suggested_eps: 0.5,
            expected: ExpectedVerdicts {
                h1: Expected::DemonstrationOnly,
                h2: Expected::DemonstrationOnly,
                h3: Expected::DemonstrationOnly,
                strict_cetaev: Expected::DemonstrationOnly,
                trajectory: TrajectoryExpectation::DemonstrationOnly,
            },
            backing: Backing::Painleve,
        },
        CorpusEntry {
            name: "quartic-well",
            summary: "-(x^4 + y^4): negative definite top jet, all hypotheses certified, asymptotic trajectory found",
            provenance: "textbook example",
            dim: 2,
            suggested_s: Some(4),
            suggested_eps: 0.5,
            expected: ExpectedVerdicts {
                h1: Expected::Certified,
                h2: Expected::Certified,
                h3: Expected::Certified,
                strict_cetaev: Expected::Certified,
                trajectory: TrajectoryExpectation::Found,
            },
            backing: Backing::Poly(polys::quartic_well),
        },
        CorpusEntry {
            name: "quartic-saddle",
            summary: "y^2 - x^4: degenerate saddle at jet order 4 with nonnegative lower jets",
            provenance: "textbook example",
            dim: 2,
            suggested_s: Some(4),
            suggested_eps: 0.5,
            expected: ExpectedVerdicts {
                h1: Expected::Certified,
                h2: Expected::Certified,
                h3: Expected::Certified,
                strict_cetaev: Expected::Certified,
                trajectory: TrajectoryExpectation::Found,
            },
            backing: Backing::Poly(polys::quartic_saddle),
        },
        CorpusEntry {
            name: "quartic-mixed",
            summary: "x^4 - y^4 + y^6: negative jet region whose closure touches the zero set of the radial derivative",
            provenance: "verdicts fixed by the built-in grid oracle",
            dim: 2,
            suggested_s: Some(4),
            suggested_eps: 0.5,
            expected: ExpectedVerdicts {
                h1: Expected::Certified,
                h2: Expected::Certified,
                h3: Expected::Refuted,
                strict_cetaev: Expected::Refuted,
                trajectory: TrajectoryExpectation::Refused,
            },
            backing: Backing::Poly(polys::quartic_mixed),
        },
        CorpusEntry {
            name: "cubic-1d",
            summary: "-x^4/4 in one degree of freedom: closed-form escaping family x(t) = sqrt(2)/(c - t)",
            provenance: "analytic benchmark",
            dim: 1,
            suggested_s: Some(4),
            suggested_eps: 0.5,
            expected: ExpectedVerdicts {
                h1: Expected::Certified,
                h2: Expected::Certified,
                h3: Expected::Certified,
                strict_cetaev: Expected::Certified,
                trajectory: TrajectoryExpectation::Found,
            },
            backing: Backing::Poly(polys::cubic_1d),
        },
    ]
}

/// Looks an entry up by name.
pub fn entry(name: &str) -> Option<CorpusEntry> {
    catalog().into_iter().find(|e| e.name == name)
}
