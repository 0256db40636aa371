//! The auxiliary semi-algebraic region `W = {Q < 0}` and the sandwich check
//! that the potential is positive on `∂W` while its radial derivative is
//! negative on the closure of `W`.

use super::{AnalysisParams, PotentialField, SphereSample};
use crate::poly::{rat, JetDecomposition, Polynomial};
use crate::report::{Verdict, Witness};
use rayon::prelude::*;
use serde::Serialize;

/// Builds the exact polynomial
/// `Q = (s−1)·j^s + ½(−Σ_{l=2}^{s−2} j^l + Π_s)`
/// whose negative set (inside a small ball) is the region `W`.
pub fn build_w_region(jets: &JetDecomposition, s: u32) -> Polynomial {
    assert!(s >= 2, "region construction needs order at least 2");
    let mut q = jets.jet(s).scale(&rat(s as i64 - 1, 1));
    for l in 2..=s.saturating_sub(2) {
        q = q.try_sub(&jets.jet(l).scale(&rat(1, 2))).expect("same dimension");
    }
    q.try_add(&jets.part(s).scale(&rat(1, 2))).expect("same dimension")
}

/// One radius of the sandwich check.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichRadius {
    pub radius: f64,
    /// Number of adjacency edges where `Q` changes sign (boundary samples).
    pub boundary_samples: usize,
    /// Minimum of Π over the refined boundary samples.
    pub potential_min_on_boundary: Option<f64>,
    pub potential_positive_on_boundary: bool,
    /// Number of sample points with `Q ≤ 0` (the closure of `W` at this radius).
    pub closure_samples: usize,
    /// Maximum of `R_Π` over the closure samples.
    pub radial_max_on_closure: Option<f64>,
    pub radial_negative_on_closure: bool,
}

impl SandwichRadius {
    fn holds(&self) -> bool {
        self.potential_positive_on_boundary && self.radial_negative_on_closure
    }
}

/// Result of the sandwich check over the halving schedule.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub verdict: Verdict,
    /// Largest schedule radius such that both inclusions hold at it and at
    /// every smaller schedule radius.
    pub eps1: Option<f64>,
    pub per_radius: Vec<SandwichRadius>,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

/// Verifies, by sampling, that `Π > 0` on `∂W` and `R_Π < 0` on the closure
/// of `W`, over the halving schedule `eps·2^-j`, `j = 0..=8`.
///
/// Boundary samples come from bisecting adjacency edges along which `Q`
/// changes sign; closure samples are the points with `Q ≤ 0`. Reports the
/// largest radius at which both conditions hold there and at every smaller
/// schedule radius; inconclusive (with witnesses) when no radius works.
pub fn verify_sandwich(
    field: &PotentialField,
    q_region: &Polynomial,
    sample: &SphereSample,
    eps: f64,
    params: &AnalysisParams,
) -> SandwichReport {
    const HALVINGS: usize = 9; // eps down to eps/2^8
    let q_degree = q_region.degree() as i32;
    let mut per_radius = Vec::with_capacity(HALVINGS);
    let mut witnesses: Vec<Witness> = Vec::new();

    for j in 0..HALVINGS {
        let r = eps * 0.5f64.powi(j as i32);
        let band = params.zero_tol * r.powi(q_degree);
        let qvals: Vec<f64> = (0..sample.len())
            .into_par_iter()
            .map(|i| q_region.eval_f64(&sample.point(i, r)).expect("dimension checked"))
            .collect();

        // Boundary of W: bisect sign-change edges of Q down to the crossing.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for i in 0..sample.len() {
            for &k in sample.neighbors(i) {
                if i < k && qvals[i] * qvals[k] < 0.0 {
                    edges.push((i, k));
                }
            }
        }
        let boundary_points: Vec<Vec<f64>> = edges
            .par_iter()
            .map(|&(i, k)| {
                let mut a = sample.point(i, r);
                let mut b = sample.point(k, r);
                let mut qa = q_region.eval_f64(&a).expect("dimension checked");
                for _ in 0..40 {
                    let mut mid: Vec<f64> =
                        a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
                    let n = mid.iter().map(|x| x * x).sum::<f64>().sqrt();
                    for x in &mut mid {
                        *x *= r / n;
                    }
                    let qm = q_region.eval_f64(&mid).expect("dimension checked");
                    if qa * qm <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        qa = qm;
                    }
                }
                a
            })
            .collect();

        let mut potential_min: Option<f64> = None;
        let mut boundary_ok = true;
        for p in &boundary_points {
            let v = field.value(p);
            potential_min = Some(potential_min.map_or(v, |m: f64| m.min(v)));
            if v <= 0.0 {
                boundary_ok = false;
                if witnesses.len() < 8 {
                    witnesses.push(Witness {
                        point: p.clone(),
                        radius: r,
                        quantity: "Pi".into(),
                        value: v,
                        exact_sign: field.exact_value_sign(p),
                        kind: "w-boundary".into(),
                    });
                }
            }
        }

        // Closure of W at this radius: sample points with Q <= 0, widened by
        // the zero band so boundary-straddling points count as closure.
        let mut radial_max: Option<f64> = None;
        let mut closure_ok = true;
        let mut closure_samples = 0usize;
        for (i, &qv) in qvals.iter().enumerate() {
            if qv > band {
                continue;
            }
            closure_samples += 1;
            let p = sample.point(i, r);
            let (rv, noise) = field.radial_with_bound(&p);
            radial_max = Some(radial_max.map_or(rv, |m: f64| m.max(rv)));
            let negative = if rv.abs() <= noise {
                matches!(field.exact_radial_sign(&p), Some(-1))
            } else {
                rv < 0.0
            };
            if !negative {
                closure_ok = false;
                if witnesses.len() < 8 {
                    witnesses.push(Witness {
                        point: p,
                        radius: r,
                        quantity: "R_Pi".into(),
                        value: rv,
                        exact_sign: field.exact_radial_sign(&sample.point(i, r)),
                        kind: "w-closure".into(),
                    });
                }
            }
        }

        per_radius.push(SandwichRadius {
            radius: r,
            boundary_samples: boundary_points.len(),
            potential_min_on_boundary: potential_min,
            potential_positive_on_boundary: boundary_ok,
            closure_samples,
            radial_max_on_closure: radial_max,
            radial_negative_on_closure: closure_ok,
        });
    }

    // eps1 = largest radius such that the checks hold from there downward.
    let mut eps1 = None;
    for j in (0..per_radius.len()).rev() {
        if per_radius[j].holds() {
            eps1 = Some(per_radius[j].radius);
        } else {
            break;
        }
    }
    // require the whole tail to hold, so eps1 = first index from which all hold
    let verdict = if eps1.is_some() { Verdict::Certified } else { Verdict::Inconclusive };
    let mut notes = Vec::new();
    if eps1.is_none() {
        notes.push("no radius in the halving schedule satisfies both inclusions".to_string());
    }
    SandwichReport { verdict, eps1, per_radius, witnesses, notes }
}
