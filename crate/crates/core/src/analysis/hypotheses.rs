//! The hypothesis checks: nonnegative lower jets, no-minimum certification
//! via tangent directions, containment of the negative jet region in the
//! negative radial-derivative region, and the strict Cetaev condition on the
//! full potential.

use super::regions::{closure_ring, RegionLabeling};
use super::{
    label_field_regions, label_jet_regions, AnalysisParams, PotentialField, SphereSample,
};
use crate::poly::{JetDecomposition, Polynomial};
use crate::report::{CheckOutcome, Verdict, Witness};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("sphere sample is empty")]
    EmptySample,
    #[error("hypothesis checks need jet order at least 2 (got {0})")]
    OrderTooSmall(u32),
}

/// Radii (relative to the unit sphere) at which the lower jets are probed.
const H1_RADII: [f64; 3] = [1.0, 0.5, 0.25];

/// Checks that every lower jet `j^l Π`, `2 ≤ l ≤ s−1`, is nonnegative on the
/// sampled sphere at radii 1, 1/2, 1/4.
///
/// Values are normalized by `r^l`. A decisively negative value refutes with a
/// witness; otherwise the check certifies-by-sampling with the minimum
/// observed margin, or stays inconclusive when the minimum sits inside the
/// zero band and exact arithmetic cannot resolve it.
pub fn check_h1(
    jets: &JetDecomposition,
    s: u32,
    sample: &SphereSample,
    params: &AnalysisParams,
) -> Result<CheckOutcome, AnalysisError> {
    if sample.is_empty() {
        return Err(AnalysisError::EmptySample);
    }
    if s < 2 {
        return Err(AnalysisError::OrderTooSmall(s));
    }
    if s == 2 {
        return Ok(CheckOutcome::certified(0.0)
            .with_note("no lower jets to check for order 2; holds vacuously".to_string()));
    }

    let mut min_margin = f64::INFINITY;
    let mut witnesses: Vec<Witness> = Vec::new();
    let mut undecided = false;

    for l in 2..s {
        let jl = jets.jet(l);
        for &r in &H1_RADII {
            let scale = r.powi(l as i32);
            let band = params.zero_tol * scale;
            let evals: Vec<(f64, f64)> = (0..sample.len())
                .into_par_iter()
                .map(|i| jl.eval_f64_with_bound(&sample.point(i, r)).expect("dimension checked"))
                .collect();
            for (i, (v, noise)) in evals.iter().enumerate() {
                let guard = band.max(*noise);
                let nv = v / scale;
                if *v < -guard {
                    let point = sample.point(i, r);
                    let exact_sign = jl.sign_at_f64(&point);
                    min_margin = min_margin.min(nv);
                    witnesses.push(Witness {
                        point,
                        radius: r,
                        quantity: format!("j{l}"),
                        value: *v,
                        exact_sign,
                        kind: "interior".into(),
                    });
                } else if v.abs() <= guard {
                    // inside the zero band: let exact arithmetic decide
                    let point = sample.point(i, r);
                    match jl.sign_at_f64(&point) {
                        Some(-1) => {
                            min_margin = min_margin.min(nv.min(0.0));
                            witnesses.push(Witness {
                                point,
                                radius: r,
                                quantity: format!("j{l}"),
                                value: *v,
                                exact_sign: Some(-1),
                                kind: "interior".into(),
                            });
                        }
                        Some(_) => min_margin = min_margin.min(0.0),
                        None => {
                            undecided = true;
                            min_margin = min_margin.min(nv);
                        }
                    }
                } else {
                    min_margin = min_margin.min(nv);
                }
            }
        }
    }

    if !witnesses.is_empty() {
        witnesses.truncate(8);
        return Ok(CheckOutcome::refuted(witnesses));
    }
    if undecided || min_margin < 0.0 {
        return Ok(CheckOutcome::inconclusive(format!(
            "minimum normalized lower-jet value {min_margin:.3e} lies in the zero band"
        )));
    }
    Ok(CheckOutcome::certified(min_margin))
}

/// A unit direction annihilating all homogeneous parts below the top order,
/// with the top part negative.
#[derive(Clone, Debug, Serialize)]
pub struct TangentDirection {
    pub direction: Vec<f64>,
    /// `max_{2 ≤ l < s} |Π_l(u)|` after refinement.
    pub residual: f64,
    /// `Π_s(u)`.
    pub top_value: f64,
}

/// Directions in the tangent cone of the negative jet region, found by
/// filtering the sphere sample and refining candidates with projected
/// descent on `Σ_l Π_l(u)²`.
#[derive(Clone, Debug, Serialize)]
pub struct TangentDirectionSet {
    pub directions: Vec<TangentDirection>,
}

impl TangentDirectionSet {
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn best(&self) -> Option<&TangentDirection> {
        self.directions.first()
    }
}

fn normalize(u: &mut [f64]) {
    let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in u {
            *x /= n;
        }
    }
}

/// Finds sample directions with `max_{2≤l<s} |Π_l(u)| ≤ zero_tol` and
/// `Π_s(u) ≤ −neg_margin`, each refined by at most `descent_steps` projected
/// descent steps on the unit sphere.
///
/// A nonempty result certifies the no-minimum hypothesis: along such a ray
/// the jet restricts to `t^s·Π_s(u) < 0` exactly, which dominates any
/// `o(t^s)` remainder. An empty result is not a refutation — sampling may
/// miss thin cones.
pub fn find_tangent_directions(
    jets: &JetDecomposition,
    s: u32,
    sample: &SphereSample,
    params: &AnalysisParams,
) -> TangentDirectionSet {
    let lower: Vec<&Polynomial> =
        (2..s).map(|l| jets.part(l)).filter(|p| !p.is_zero()).collect();
    let lower_grads: Vec<Vec<Polynomial>> = lower.iter().map(|p| p.gradient()).collect();
    let top = jets.part(s);

    let residual = |u: &[f64]| -> f64 {
        lower
            .iter()
            .map(|p| p.eval_f64(u).expect("dimension checked").abs())
            .fold(0.0f64, f64::max)
    };
    let objective = |u: &[f64]| -> f64 {
        lower
            .iter()
            .map(|p| {
                let v = p.eval_f64(u).expect("dimension checked");
                v * v
            })
            .sum()
    };

    // Candidates must already sit near the common zero cone of the lower
    // parts: one adjacency step of resolution is plenty, 0.1 is generous.
    const RESIDUAL_PREFILTER: f64 = 0.1;

    let refined: Vec<TangentDirection> = (0..sample.len())
        .into_par_iter()
        .filter_map(|i| {
            let mut u = sample.direction(i).to_vec();
            let top_v = top.eval_f64(&u).expect("dimension checked");
            if top_v > -params.neg_margin {
                return None;
            }
            if !lower.is_empty() && residual(&u) > RESIDUAL_PREFILTER {
                return None;
            }
            if !lower.is_empty() {
                let mut f = objective(&u);
                let mut t = 1.0f64;
                let mut steps = 0usize;
                while steps < params.descent_steps
                    && f > 0.0
                    && residual(&u) > params.zero_tol * 1e-2
                {
                    // projected gradient of Σ Π_l(u)²
                    let mut g = vec![0.0; u.len()];
                    for (p, grads) in lower.iter().zip(&lower_grads) {
                        let v = p.eval_f64(&u).expect("dimension checked");
                        for (k, gp) in grads.iter().enumerate() {
                            g[k] += 2.0 * v * gp.eval_f64(&u).expect("dimension checked");
                        }
                    }
                    let dot: f64 = g.iter().zip(&u).map(|(a, b)| a * b).sum();
                    for (k, x) in u.iter().enumerate() {
                        g[k] -= dot * x;
                    }
                    let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if gn < 1e-18 {
                        break;
                    }
                    let mut accepted = false;
                    let mut tt = t;
                    for _ in 0..60 {
                        let mut cand: Vec<f64> =
                            u.iter().zip(&g).map(|(x, gk)| x - tt * gk).collect();
                        normalize(&mut cand);
                        let fc = objective(&cand);
                        if fc < f {
                            u = cand;
                            f = fc;
                            t = tt * 2.0;
                            accepted = true;
                            break;
                        }
                        tt *= 0.5;
                    }
                    if !accepted {
                        break;
                    }
                    steps += 1;
                }
            }
            let res = residual(&u);
            let top_v = top.eval_f64(&u).expect("dimension checked");
            if res <= params.zero_tol && top_v <= -params.neg_margin {
                Some(TangentDirection { direction: u, residual: res, top_value: top_v })
            } else {
                None
            }
        })
        .collect();

    // Deduplicate refined directions that collapsed onto the same point,
    // then order by how negative the top part is.
    let mut kept: Vec<TangentDirection> = Vec::new();
    for cand in refined {
        let dup = kept.iter().any(|k| {
            k.direction
                .iter()
                .zip(&cand.direction)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                < 1e-5
        });
        if !dup {
            kept.push(cand);
        }
    }
    kept.sort_by(|a, b| {
        a.top_value
            .partial_cmp(&b.top_value)
            .unwrap()
            .then(a.residual.partial_cmp(&b.residual).unwrap())
            .then_with(|| {
                a.direction
                    .iter()
                    .zip(&b.direction)
                    .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    TangentDirectionSet { directions: kept }
}

/// Decides the no-minimum hypothesis from the tangent-direction search.
///
/// Certified when the set is nonempty (the exact-ray argument above);
/// refuted when the top jet is bounded below by `neg_margin·|q|^s` on the
/// whole sample (the jet has a strict minimum at sampled scale);
/// inconclusive otherwise.
pub fn check_h2(
    jets: &JetDecomposition,
    s: u32,
    sample: &SphereSample,
    tangent: &TangentDirectionSet,
    params: &AnalysisParams,
) -> CheckOutcome {
    if let Some(best) = tangent.best() {
        return CheckOutcome::certified(-best.top_value).with_note(format!(
            "{} tangent direction(s): rays where the jet restricts to t^{s}·Π_{s}(u) with Π_{s}(u) < 0",
            tangent.directions.len()
        ));
    }
    // No tangent direction found; see whether the jet looks positive definite.
    let js = jets.jet(s);
    let mut min_nv = f64::INFINITY;
    let mut min_point: Option<(Vec<f64>, f64, f64)> = None;
    for &r in &H1_RADII {
        let scale = r.powi(s as i32);
        for i in 0..sample.len() {
            let q = sample.point(i, r);
            let v = js.eval_f64(&q).expect("dimension checked");
            let nv = v / scale;
            if nv < min_nv {
                min_nv = nv;
                min_point = Some((q, r, v));
            }
        }
    }
    if min_nv >= params.neg_margin {
        let (point, radius, value) = min_point.expect("sample nonempty");
        let exact_sign = js.sign_at_f64(&point);
        return CheckOutcome {
            verdict: Verdict::Refuted,
            margin: Some(min_nv),
            witnesses: vec![Witness {
                point,
                radius,
                quantity: format!("j{s}"),
                value,
                exact_sign,
                kind: "minimum-margin".into(),
            }],
            notes: vec![format!(
                "jet bounded below by {:.3e}·|q|^{s} on the whole sample: strict minimum at sampled scale",
                params.neg_margin
            )],
        };
    }
    CheckOutcome::inconclusive(
        "no tangent direction found and the jet is not positive definite at sampled scale",
    )
}

struct ComponentAssessment {
    verdict: Verdict,
    margin: f64,
    witness: Option<Witness>,
    indices: Vec<usize>,
}

/// Assesses one labeled radius: for each negative component, the radial
/// quantity must be strictly negative on the component (exact arithmetic when
/// available) and at most `−eta·r^s` on the closure ring.
fn assess_level(
    level_idx: usize,
    labeling: &RegionLabeling,
    sample: &SphereSample,
    radial_exact: Option<&Polynomial>,
    quantity: &str,
    params: &AnalysisParams,
) -> Vec<ComponentAssessment> {
    let level = &labeling.levels[level_idx];
    let r = level.radius;
    let scale = r.powi(labeling.norm_degree as i32);
    let eta = params.eta;

    level
        .components
        .iter()
        .map(|comp| {
            let ring = closure_ring(sample, comp);
            let mut verdict = Verdict::Certified;
            let mut margin = f64::INFINITY;
            let mut witness: Option<Witness> = None;

            let make_witness = |i: usize, kind: &str| -> Witness {
                let point = sample.point(i, r);
                let exact_sign = radial_exact.and_then(|p| p.sign_at_f64(&point));
                Witness {
                    point,
                    radius: r,
                    quantity: quantity.to_string(),
                    value: level.radial_values[i],
                    exact_sign,
                    kind: kind.into(),
                }
            };

            // Interior: strict negativity, decided exactly when near zero.
            for &i in comp {
                let rv = level.radial_values[i];
                let noise = level.radial_noise[i];
                let nv = rv / scale;
                margin = margin.min(-nv);
                if nv >= eta {
                    verdict = Verdict::Refuted;
                    witness = Some(make_witness(i, "interior"));
                    break;
                }
                if rv >= 0.0 || rv.abs() <= noise {
                    match radial_exact.and_then(|p| p.sign_at_f64(&sample.point(i, r))) {
                        Some(-1) => {}
                        Some(_) => {
                            // exactly nonnegative radial derivative at a point
                            // of the open negative region
                            verdict = Verdict::Refuted;
                            witness = Some(make_witness(i, "interior"));
                            break;
                        }
                        None => {
                            if verdict == Verdict::Certified {
                                verdict = Verdict::Inconclusive;
                            }
                        }
                    }
                }
            }
            // Closure ring: certified only beyond the eta margin.
            if verdict != Verdict::Refuted {
                for &i in &ring {
                    let nv = level.radial_values[i] / scale;
                    margin = margin.min(-nv);
                    if nv >= eta {
                        verdict = Verdict::Refuted;
                        witness = Some(make_witness(i, "closure-ring"));
                        break;
                    }
                    if nv > -eta && verdict == Verdict::Certified {
                        verdict = Verdict::Inconclusive;
                    }
                }
            }
            ComponentAssessment { verdict, margin, witness, indices: comp.clone() }
        })
        .collect()
}

/// Links components across consecutive radii when their direction-index sets
/// intersect; returns one family id per (level, component).
fn link_families(assessed: &[Vec<ComponentAssessment>]) -> Vec<Vec<usize>> {
    let mut ids: Vec<Vec<usize>> = Vec::new();
    let mut next = 0usize;
    // union-find over family ids
    let mut parent: Vec<usize> = Vec::new();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (li, level) in assessed.iter().enumerate() {
        let mut level_ids = Vec::with_capacity(level.len());
        for comp in level {
            let mut id = None;
            if li > 0 {
                for (pj, prev) in assessed[li - 1].iter().enumerate() {
                    let overlap = {
                        let a = &prev.indices;
                        let b = &comp.indices;
                        let (mut x, mut y) = (0usize, 0usize);
                        let mut hit = false;
                        while x < a.len() && y < b.len() {
                            match a[x].cmp(&b[y]) {
                                std::cmp::Ordering::Less => x += 1,
                                std::cmp::Ordering::Greater => y += 1,
                                std::cmp::Ordering::Equal => {
                                    hit = true;
                                    break;
                                }
                            }
                        }
                        hit
                    };
                    if overlap {
                        let pid = find(&mut parent, ids[li - 1][pj]);
                        match id {
                            None => id = Some(pid),
                            Some(cur) => {
                                let cur = find(&mut parent, cur);
                                parent[pid.max(cur)] = pid.min(cur);
                                id = Some(pid.min(cur));
                            }
                        }
                    }
                }
            }
            let id = id.unwrap_or_else(|| {
                parent.push(next);
                next += 1;
                next - 1
            });
            level_ids.push(id);
        }
        ids.push(level_ids);
    }
    for level in &mut ids {
        for id in level.iter_mut() {
            *id = find(&mut parent, *id);
        }
    }
    ids
}

fn aggregate(
    assessed: Vec<Vec<ComponentAssessment>>,
    quantity: &str,
    eta: f64,
) -> (CheckOutcome, Option<usize>) {
    let n_levels = assessed.len();
    let any_components = assessed.iter().any(|l| !l.is_empty());
    if !any_components {
        return (
            CheckOutcome::inconclusive(format!(
                "no negative region detected at any of the {n_levels} sampled radii"
            )),
            None,
        );
    }

    // Refuted: at some radius the negative set exists and every component is
    // refuted there.
    let mut witnesses: Vec<Witness> = Vec::new();
    let mut refuted_level = false;
    for level in &assessed {
        if !level.is_empty() && level.iter().all(|c| c.verdict == Verdict::Refuted) {
            refuted_level = true;
            for c in level {
                if let Some(w) = &c.witness {
                    witnesses.push(w.clone());
                }
            }
        }
    }
    if refuted_level {
        witnesses.truncate(16);
        let out = CheckOutcome::refuted(witnesses).with_note(
            "every negative component at some sampled radius has a closure point with nonnegative radial derivative (closure approximated by one adjacency ring)",
        );
        return (out, None);
    }

    // Certified: some cross-radius family present and certified at every
    // sampled radius.
    let families = link_families(&assessed);
    let mut family_ids: Vec<usize> = families.iter().flatten().copied().collect();
    family_ids.sort_unstable();
    family_ids.dedup();
    let mut best: Option<(usize, f64)> = None;
    for &fid in &family_ids {
        let mut margin = f64::INFINITY;
        let mut ok = true;
        for (li, level) in assessed.iter().enumerate() {
            let members: Vec<&ComponentAssessment> = level
                .iter()
                .enumerate()
                .filter(|(ci, _)| families[li][*ci] == fid)
                .map(|(_, c)| c)
                .collect();
            if members.is_empty() {
                ok = false;
                break;
            }
            for m in members {
                if m.verdict != Verdict::Certified {
                    ok = false;
                    break;
                }
                margin = margin.min(m.margin);
            }
            if !ok {
                break;
            }
        }
        if ok && best.map(|(_, m)| margin > m).unwrap_or(true) {
            best = Some((fid, margin));
        }
    }
    if let Some((fid, margin)) = best {
        let out = CheckOutcome::certified(margin).with_note(format!(
            "{quantity} below -{eta:.0e}·|q|^s on the closure ring and strictly negative on the component at every sampled radius"
        ));
        return (out, Some(fid));
    }
    (
        CheckOutcome::inconclusive(
            "no component family is certified across all radii and no radius refutes every component",
        ),
        None,
    )
}

/// Checks containment of the closure of a negative jet component in the
/// negative radial-derivative region, on the sampled labeling.
///
/// The check is existential: certified if some component family keeps
/// `R^s` strictly negative (with the `eta` ring margin) at every radius;
/// refuted if at some radius every component has a closure point with
/// `R^s ≥ +eta·|q|^s` (or exactly nonnegative in the interior).
pub fn check_h3(
    jets: &JetDecomposition,
    s: u32,
    labeling: &RegionLabeling,
    sample: &SphereSample,
    params: &AnalysisParams,
) -> CheckOutcome {
    let rs = jets.jet(s).radial_derivative();
    let quantity = format!("R{s}");
    let assessed: Vec<Vec<ComponentAssessment>> = (0..labeling.levels.len())
        .map(|li| assess_level(li, labeling, sample, Some(&rs), &quantity, params))
        .collect();
    aggregate(assessed, &quantity, params.eta).0
}

/// Result of the strict Cetaev check on the full potential.
#[derive(Clone, Debug, Serialize)]
pub struct StrictCetaevOutcome {
    pub outcome: CheckOutcome,
    /// Family id of the certified component, when certified.
    pub component: Option<usize>,
    /// Analysis radius the schedule started from.
    pub eps: f64,
}

/// Strict Cetaev condition: some negative component of the potential keeps
/// `R_Π` strictly negative on its closure approximation at every radius of
/// the halving schedule. Same sampling semantics as [`check_h3`], applied to
/// Π and `R_Π` instead of the jet pair.
pub fn check_strict_cetaev(
    field: &PotentialField,
    eps: f64,
    sample: &SphereSample,
    params: &AnalysisParams,
) -> StrictCetaevOutcome {
    let labeling = label_field_regions(field, sample, eps, params);
    let assessed: Vec<Vec<ComponentAssessment>> = (0..labeling.levels.len())
        .map(|li| {
            assess_level(li, &labeling, sample, field.radial_polynomial(), "R_Pi", params)
        })
        .collect();
    let (outcome, component) = aggregate(assessed, "R_Pi", params.eta);
    StrictCetaevOutcome { outcome, component, eps }
}

/// Summary of the tangent-direction search included in reports.
#[derive(Clone, Debug, Serialize)]
pub struct TangentSummary {
    pub count: usize,
    /// The best few directions (most negative top part first).
    pub listed: Vec<TangentDirection>,
}

impl TangentSummary {
    pub fn from_set(set: &TangentDirectionSet) -> Self {
        TangentSummary {
            count: set.directions.len(),
            listed: set.directions.iter().take(8).cloned().collect(),
        }
    }
}

/// Full analysis document for one potential.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub potential: String,
    pub dimension: usize,
    pub jet_order: Option<u32>,
    pub eps: f64,
    pub parameters: AnalysisParams,
    pub h1: CheckOutcome,
    pub h2: CheckOutcome,
    pub h3: CheckOutcome,
    pub strict_cetaev: CheckOutcome,
    pub strict_cetaev_component: Option<usize>,
    pub tangent_directions: TangentSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

/// Runs the whole hypothesis battery on one field.
///
/// Fields without a polynomial jet (closure-backed catalog entries) get
/// inconclusive jet hypotheses with a note; the strict Cetaev check still
/// runs on the float evaluators.
pub fn analyze(
    field: &PotentialField,
    eps: f64,
    sample: &SphereSample,
    params: &AnalysisParams,
) -> Result<HypothesisReport, AnalysisError> {
    if sample.is_empty() {
        return Err(AnalysisError::EmptySample);
    }
    let (h1, h2, h3, tangent) = match (field.jets(), field.jet_order()) {
        (Some(jets), Some(s)) => {
            let h1 = check_h1(jets, s, sample, params)?;
            let tangent = find_tangent_directions(jets, s, sample, params);
            let h2 = check_h2(jets, s, sample, &tangent, params);
            let labeling = label_jet_regions(jets, s, sample, eps, params);
            let h3 = check_h3(jets, s, &labeling, sample, params);
            (h1, h2, h3, tangent)
        }
        _ => {
            let note = "no polynomial jet available for this potential";
            (
                CheckOutcome::inconclusive(note),
                CheckOutcome::inconclusive(note),
                CheckOutcome::inconclusive(note),
                TangentDirectionSet { directions: vec![] },
            )
        }
    };
    let strict = check_strict_cetaev(field, eps, sample, params);
    Ok(HypothesisReport {
        potential: field.label(),
        dimension: field.dim(),
        jet_order: field.jet_order(),
        eps,
        parameters: params.clone(),
        h1,
        h2,
        h3,
        strict_cetaev: strict.outcome,
        strict_cetaev_component: strict.component,
        tangent_directions: TangentSummary::from_set(&tangent),
        timestamp: None,
    })
}
