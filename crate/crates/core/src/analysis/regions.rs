//! Sign labeling of sphere samples and connected components of the negative
//! set on the adjacency graph.

use super::{AnalysisParams, PotentialField, SphereSample};
use crate::poly::{JetDecomposition, Polynomial};
use rayon::prelude::*;
use serde::Serialize;

/// Sign of a sampled value after tie-breaking. Values inside the zero band
/// are escalated to exact arithmetic when a backing polynomial exists;
/// an exact zero (or an undecidable closure-backed value) is `Boundary`,
/// never part of the open negative set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignClass {
    Negative,
    Boundary,
    Positive,
}

/// Labels of one sphere radius: the region-defining values (jet or
/// potential), the radial-derivative values, and the connected components of
/// the negative set.
#[derive(Clone, Debug)]
pub struct RadiusLabeling {
    pub radius: f64,
    pub region_values: Vec<f64>,
    pub region_signs: Vec<SignClass>,
    pub radial_values: Vec<f64>,
    pub radial_noise: Vec<f64>,
    /// Negative components as sorted point-index lists.
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<Option<usize>>,
}

/// Labels across the radius schedule `eps * 2^-j`, `j = 0..levels`.
///
/// The cone structure of jets near the origin makes agreement across radii a
/// consistency signal; components at different radii share direction indices.
#[derive(Clone, Debug)]
pub struct RegionLabeling {
    pub eps: f64,
    pub norm_degree: u32,
    pub levels: Vec<RadiusLabeling>,
}

pub(super) struct FieldPair<'a> {
    pub region_float: &'a (dyn Fn(&[f64]) -> (f64, f64) + Sync),
    pub radial_float: &'a (dyn Fn(&[f64]) -> (f64, f64) + Sync),
    pub region_exact: Option<&'a Polynomial>,
}

pub(super) fn classify(
    value: f64,
    noise: f64,
    band: f64,
    exact: Option<&Polynomial>,
    point: &[f64],
) -> SignClass {
    let guard = band.max(noise);
    if value.abs() > guard {
        return if value < 0.0 { SignClass::Negative } else { SignClass::Positive };
    }
    match exact.and_then(|p| p.sign_at_f64(point)) {
        Some(-1) => SignClass::Negative,
        Some(1) => SignClass::Positive,
        _ => SignClass::Boundary,
    }
}

pub(super) fn label(
    sample: &SphereSample,
    eps: f64,
    norm_degree: u32,
    params: &AnalysisParams,
    pair: &FieldPair<'_>,
) -> RegionLabeling {
    let mut levels = Vec::with_capacity(params.radius_levels);
    for j in 0..params.radius_levels {
        let r = eps * 0.5f64.powi(j as i32);
        let band = params.zero_tol * r.powi(norm_degree as i32);
        let per_point: Vec<(f64, SignClass, f64, f64)> = (0..sample.len())
            .into_par_iter()
            .map(|i| {
                let q = sample.point(i, r);
                let (v, noise) = (pair.region_float)(&q);
                let sign = classify(v, noise, band, pair.region_exact, &q);
                let (rv, rnoise) = (pair.radial_float)(&q);
                (v, sign, rv, rnoise)
            })
            .collect();
        let region_values: Vec<f64> = per_point.iter().map(|t| t.0).collect();
        let region_signs: Vec<SignClass> = per_point.iter().map(|t| t.1).collect();
        let radial_values: Vec<f64> = per_point.iter().map(|t| t.2).collect();
        let radial_noise: Vec<f64> = per_point.iter().map(|t| t.3).collect();
        let (components, component_of) = negative_components(sample, &region_signs);
        levels.push(RadiusLabeling {
            radius: r,
            region_values,
            region_signs,
            radial_values,
            radial_noise,
            components,
            component_of,
        });
    }
    RegionLabeling { eps, norm_degree, levels }
}

/// Connected components of the negative-labeled points in the adjacency graph.
fn negative_components(
    sample: &SphereSample,
    signs: &[SignClass],
) -> (Vec<Vec<usize>>, Vec<Option<usize>>) {
    let n = sample.len();
    let mut component_of: Vec<Option<usize>> = vec![None; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if signs[start] != SignClass::Negative || component_of[start].is_some() {
            continue;
        }
        let id = components.len();
        let mut comp = Vec::new();
        let mut stack = vec![start];
        component_of[start] = Some(id);
        while let Some(i) = stack.pop() {
            comp.push(i);
            for &j in sample.neighbors(i) {
                if signs[j] == SignClass::Negative && component_of[j].is_none() {
                    component_of[j] = Some(id);
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    (components, component_of)
}

/// Closure approximation of a component: its points plus one ring of graph
/// neighbors (the exact closure has no finite representation at sample
/// resolution). Returns `(component, ring)`, both sorted.
pub(super) fn closure_ring(sample: &SphereSample, component: &[usize]) -> Vec<usize> {
    let inside: std::collections::BTreeSet<usize> = component.iter().copied().collect();
    let mut ring = std::collections::BTreeSet::new();
    for &i in component {
        for &j in sample.neighbors(i) {
            if !inside.contains(&j) {
                ring.insert(j);
            }
        }
    }
    ring.into_iter().collect()
}

/// Labels the sign of `j^s Π` and of its radial derivative `R^s` on the
/// sample across the radius schedule.
pub fn label_jet_regions(
    jets: &JetDecomposition,
    s: u32,
    sample: &SphereSample,
    eps: f64,
    params: &AnalysisParams,
) -> RegionLabeling {
    let js = jets.jet(s);
    let rs = js.radial_derivative();
    let region_float = |q: &[f64]| js.eval_f64_with_bound(q).expect("dimension checked");
    let radial_float = |q: &[f64]| rs.eval_f64_with_bound(q).expect("dimension checked");
    let pair = FieldPair {
        region_float: &region_float,
        radial_float: &radial_float,
        region_exact: Some(&js),
    };
    label(sample, eps, s, params, &pair)
}

/// Labels the sign of the full potential Π and of `R_Π` on the sample.
pub fn label_field_regions(
    field: &PotentialField,
    sample: &SphereSample,
    eps: f64,
    params: &AnalysisParams,
) -> RegionLabeling {
    let region_float = |q: &[f64]| field.value_with_bound(q);
    let radial_float = |q: &[f64]| field.radial_with_bound(q);
    let pair = FieldPair {
        region_float: &region_float,
        radial_float: &radial_float,
        region_exact: field.polynomial(),
    };
    label(sample, eps, field.norm_degree(), params, &pair)
}
