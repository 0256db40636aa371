//! Runs the full analyzer over the built-in catalog and checks that every
//! expected verdict is reproduced (demonstration-only entries exempt), plus
//! the cross-cutting consistency invariants of the hypothesis battery.

use cetaev_core::analysis::{
    analyze, check_strict_cetaev, AnalysisParams, SphereSample,
};
use cetaev_core::corpus::{catalog, entry, polys, Expected};
use cetaev_core::report::Verdict;

fn expect_match(expected: Expected, got: Verdict, what: &str, name: &str) {
    let want = match expected {
        Expected::Certified => Verdict::Certified,
        Expected::Refuted => Verdict::Refuted,
        Expected::Inconclusive => Verdict::Inconclusive,
        Expected::DemonstrationOnly => return,
    };
    assert_eq!(got, want, "{name}: {what}");
}

#[test]
fn analyzer_reproduces_catalog_verdicts() {
    let params = AnalysisParams::default();
    for e in catalog() {
        let field = e.field().unwrap();
        let sample = SphereSample::standard(e.dim, &params);
        let report = analyze(&field, e.suggested_eps, &sample, &params).unwrap();
        expect_match(e.expected.h1, report.h1.verdict, "h1", e.name);
        expect_match(e.expected.h2, report.h2.verdict, "h2", e.name);
        expect_match(e.expected.h3, report.h3.verdict, "h3", e.name);
        expect_match(e.expected.strict_cetaev, report.strict_cetaev.verdict, "strict", e.name);
    }
}

/// Independent grid oracle for the quartic-mixed entry: its verdicts are
/// fixed by brute force, not by the sampler under test. On a 100x100 grid in
/// the square, diagonal points sit exactly in the closed negative jet region
/// with radial derivative exactly zero, and points of the full potential's
/// negative-region boundary carry a positive radial derivative.
#[test]
fn grid_oracle_fixes_quartic_mixed_verdicts() {
    let p = polys::quartic_mixed();
    let j4 = p.jet(4);
    let r4 = j4.radial_derivative();
    let rp = p.radial_derivative();

    let mut h3_violation = false;
    let mut strict_violation = false;
    let n = 100;
    for i in 0..=n {
        for j in 0..=n {
            let x = -0.4 + 0.8 * (i as f64) / (n as f64);
            let y = -0.4 + 0.8 * (j as f64) / (n as f64);
            if x == 0.0 && y == 0.0 {
                continue;
            }
            let q = [x, y];
            // closed negative region of the jet with R^4 >= 0
            if j4.eval_f64(&q).unwrap() <= 0.0 && r4.eval_f64(&q).unwrap() >= 0.0 {
                h3_violation = true;
            }
            // closed negative region of the potential with R_pi >= 0
            if p.eval_f64(&q).unwrap() <= 0.0 && rp.eval_f64(&q).unwrap() >= 0.0 {
                strict_violation = true;
            }
        }
    }
    assert!(h3_violation, "diagonal boundary must violate the jet containment");
    assert!(strict_violation, "boundary radial derivative +2y^6 must violate strictness");

    let e = entry("quartic-mixed").unwrap();
    assert_eq!(e.expected.h3, Expected::Refuted);
    assert_eq!(e.expected.strict_cetaev, Expected::Refuted);
}

/// Theorem-level consistency at sample scale: whenever the jet containment
/// hypothesis certifies a component, every component sample point also has a
/// negative radial derivative, and entries with all three hypotheses
/// certified are never refuted on the strict condition.
#[test]
fn certified_entries_are_strict_consistent() {
    let params = AnalysisParams::default();
    for e in catalog() {
        let all_certified = [e.expected.h1, e.expected.h2, e.expected.h3]
            .iter()
            .all(|v| *v == Expected::Certified);
        if !all_certified {
            continue;
        }
        let field = e.field().unwrap();
        let sample = SphereSample::standard(e.dim, &params);
        let strict = check_strict_cetaev(&field, e.suggested_eps, &sample, &params);
        assert_ne!(
            strict.outcome.verdict,
            Verdict::Refuted,
            "{}: class-H entry must not refute the strict condition",
            e.name
        );
    }
}

/// Refutation witnesses re-evaluated in exact arithmetic reproduce the
/// violating sign whenever the entry is polynomial-backed.
#[test]
fn refutation_witnesses_are_exact() {
    let params = AnalysisParams::default();
    for e in catalog() {
        if e.polynomial().is_none() {
            continue;
        }
        let field = e.field().unwrap();
        let sample = SphereSample::standard(e.dim, &params);
        let report = analyze(&field, e.suggested_eps, &sample, &params).unwrap();
        for (outcome, name) in [
            (&report.h1, "h1"),
            (&report.h3, "h3"),
            (&report.strict_cetaev, "strict"),
        ] {
            if outcome.verdict != Verdict::Refuted {
                continue;
            }
            assert!(!outcome.witnesses.is_empty(), "{}: {} refuted without witness", e.name, name);
            for w in &outcome.witnesses {
                if let Some(sign) = w.exact_sign {
                    let float_sign = if w.value > 0.0 { 1 } else { -1 };
                    assert_eq!(
                        sign, float_sign,
                        "{}: {} witness exact sign disagrees with float value {:e}",
                        e.name, name, w.value
                    );
                }
            }
        }
    }
}

/// Direct containment check: whenever the jet containment certifies, every
/// negative-labeled sample point also has a negative radial value.
#[test]
fn certified_labelings_have_negative_radial_values() {
    use cetaev_core::analysis::label_jet_regions;
    let params = AnalysisParams::default();
    for e in catalog() {
        let Some(s) = e.suggested_s else { continue };
        if e.expected.h3 != Expected::Certified {
            continue;
        }
        let field = e.field().unwrap();
        let sample = SphereSample::standard(e.dim, &params);
        let labeling = label_jet_regions(field.jets().unwrap(), s, &sample, e.suggested_eps, &params);
        for level in &labeling.levels {
            for comp in &level.components {
                for &i in comp {
                    assert!(
                        level.radial_values[i] < 0.0,
                        "{}: negative-region point with nonnegative radial value at r = {}",
                        e.name,
                        level.radius
                    );
                }
            }
        }
    }
}

/// The negative region of the worked example's top jet contains the axis
/// directions at radius 0.3.
#[test]
fn worked_example_axis_component_at_smaller_radius() {
    use cetaev_core::analysis::label_jet_regions;
    let params = AnalysisParams::default();
    let field = entry("paper-example").unwrap().field().unwrap();
    let sample = SphereSample::standard(2, &params);
    let labeling = label_jet_regions(field.jets().unwrap(), 12, &sample, 0.3, &params);
    let level = &labeling.levels[0];
    // direction index 0 is exactly (1, 0); the opposite axis is at n/2
    let plus = level.component_of[0].expect("axis direction is in a negative component");
    let minus = level.component_of[sample.len() / 2].expect("opposite axis too");
    assert_ne!(plus, minus, "two separate axis components");
}

/// The published-example jet system escapes from the axis component.
#[test]
fn worked_example_jet_system_escapes() {
    use cetaev_core::analysis::PotentialField;
    use cetaev_core::dynamics::{escape_time, HamiltonianSystem, KrasovskiiRegion, State, StepControl};
    let sys = HamiltonianSystem::unit_mass(
        PotentialField::from_polynomial(polys::example_f()).unwrap(),
    );
    let region = KrasovskiiRegion::new(0.3);
    let delta = 0.05;
    // p parallel to q, scaled down until the energy is negative
    let mut lambda = 1.0;
    let start = loop {
        let st = State::new(0.0, vec![delta, 0.0], vec![lambda * delta, 0.0]);
        if sys.hamiltonian(&st.q, &st.p) < 0.0 {
            break st;
        }
        lambda *= 0.5;
    };
    let info = escape_time(&sys, &region, &start, &StepControl::default()).unwrap();
    assert!(info.t_exit > 0.0);
    assert!((info.exit.norm() - 0.3).abs() <= 1e-9);
    assert!(info.w_max < 0.0);
}

/// Grid oracle shows the sandwich genuinely fails for the quartic-mixed
/// entry (its diagonal closure points carry a positive radial derivative),
/// and the sampled check agrees.
#[test]
fn sandwich_fails_for_quartic_mixed() {
    use cetaev_core::analysis::{build_w_region, verify_sandwich};
    let params = AnalysisParams::default();
    let e = entry("quartic-mixed").unwrap();
    let field = e.field().unwrap();
    let q = build_w_region(field.jets().unwrap(), 4);
    // oracle: on the diagonal y = x the region polynomial vanishes while the
    // potential's radial derivative is +2y^6 > 0
    let rp = polys::quartic_mixed().radial_derivative();
    for x in [0.1f64, 0.2, 0.3] {
        assert!(q.eval_f64(&[x, x]).unwrap().abs() < 1e-15);
        assert!(rp.eval_f64(&[x, x]).unwrap() > 0.0);
    }
    let sample = SphereSample::standard(2, &params);
    let report = verify_sandwich(&field, &q, &sample, e.suggested_eps, &params);
    assert!(report.eps1.is_none(), "no radius passes: {:?}", report.per_radius.last());
    assert!(!report.witnesses.is_empty());
}

/// The quasi-random sampling path in dimension 3 drives the same battery:
/// a negative definite quartic certifies everything, a positive definite
/// quadratic refutes the no-minimum hypothesis.
#[test]
fn three_dimensional_sampling_path() {
    use cetaev_core::analysis::PotentialField;
    use cetaev_core::poly::{int, Polynomial};
    let params = AnalysisParams { samples_highdim: 2000, ..AnalysisParams::default() };
    let sample = SphereSample::standard(3, &params);

    let well = Polynomial::from_terms(
        3,
        vec![
            (vec![4, 0, 0], int(-1)),
            (vec![0, 4, 0], int(-1)),
            (vec![0, 0, 4], int(-1)),
        ],
    )
    .unwrap();
    let field = PotentialField::from_polynomial(well).unwrap().with_jet_order(4).unwrap();
    let report = analyze(&field, 0.5, &sample, &params).unwrap();
    assert_eq!(report.h1.verdict, Verdict::Certified);
    assert_eq!(report.h2.verdict, Verdict::Certified);
    assert_eq!(report.h3.verdict, Verdict::Certified);
    assert_eq!(report.strict_cetaev.verdict, Verdict::Certified);

    let bowl = Polynomial::from_terms(
        3,
        vec![
            (vec![2, 0, 0], int(1)),
            (vec![0, 2, 0], int(1)),
            (vec![0, 0, 2], int(1)),
        ],
    )
    .unwrap();
    let field = PotentialField::from_polynomial(bowl).unwrap().with_jet_order(2).unwrap();
    let report = analyze(&field, 0.5, &sample, &params).unwrap();
    assert_eq!(report.h2.verdict, Verdict::Refuted);
}

/// Doubling the sample density never flips a certified verdict to refuted.
#[test]
fn component_stability_under_density_doubling() {
    let base = AnalysisParams::default();
    let dense = AnalysisParams { samples_dim2: 2 * base.samples_dim2, ..base.clone() };
    for e in catalog() {
        if e.dim != 2 {
            continue;
        }
        let field = e.field().unwrap();
        let coarse_sample = SphereSample::standard(2, &base);
        let dense_sample = SphereSample::standard(2, &dense);
        let coarse = analyze(&field, e.suggested_eps, &coarse_sample, &base).unwrap();
        let fine = analyze(&field, e.suggested_eps, &dense_sample, &dense).unwrap();
        for (c, f, what) in [
            (&coarse.h1, &fine.h1, "h1"),
            (&coarse.h3, &fine.h3, "h3"),
            (&coarse.strict_cetaev, &fine.strict_cetaev, "strict"),
        ] {
            if c.verdict == Verdict::Certified {
                assert_ne!(
                    f.verdict,
                    Verdict::Refuted,
                    "{}: {} flipped certified -> refuted under density doubling",
                    e.name,
                    what
                );
            }
        }
    }
}
