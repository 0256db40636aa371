//! Deterministic sphere discretization with a k-nearest neighbor graph.

use super::AnalysisParams;
use rayon::prelude::*;

/// Unit-sphere sample: a fixed list of directions plus a symmetric
/// k-nearest-by-angle adjacency graph. Points at radius `r` are the
/// directions scaled by `r`, so labels at different radii share indices.
#[derive(Clone, Debug)]
pub struct SphereSample {
    dim: usize,
    directions: Vec<Vec<f64>>,
    adjacency: Vec<Vec<usize>>,
}

impl SphereSample {
    /// Default sample for the given dimension: `S^0 = {±1}` in dimension 1,
    /// uniform angles in dimension 2, a deterministic quasi-random set in
    /// dimension ≥ 3.
    pub fn standard(dim: usize, params: &AnalysisParams) -> Self {
        match dim {
            0 => panic!("dimension must be positive"),
            1 => Self::dim1(),
            2 => Self::uniform_circle(params.samples_dim2, params.neighbors),
            _ => Self::quasi_random(dim, params.samples_highdim, params.neighbors),
        }
    }

    fn dim1() -> Self {
        // The 0-sphere is disconnected; the two points are not neighbors.
        SphereSample {
            dim: 1,
            directions: vec![vec![1.0], vec![-1.0]],
            adjacency: vec![vec![], vec![]],
        }
    }

    /// `count` uniform angles on the circle; neighbors are the `k/2` nearest
    /// on each side.
    pub fn uniform_circle(count: usize, neighbors: usize) -> Self {
        assert!(count > neighbors && count >= 8);
        let directions: Vec<Vec<f64>> = (0..count)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect();
        let half = (neighbors / 2).max(1);
        let adjacency = (0..count)
            .map(|i| {
                let mut adj: Vec<usize> = Vec::with_capacity(2 * half);
                for d in 1..=half {
                    adj.push((i + d) % count);
                    adj.push((i + count - d) % count);
                }
                adj.sort_unstable();
                adj
            })
            .collect();
        SphereSample { dim: 2, directions, adjacency }
    }

    /// Deterministic quasi-random directions: a Kronecker (additive
    /// recurrence) sequence pushed through Box–Muller pairs and normalized.
    pub fn quasi_random(dim: usize, count: usize, neighbors: usize) -> Self {
        assert!(dim >= 3 && count > neighbors);
        let coords = dim + (dim & 1); // even number of uniforms per point
        // Generalized golden-ratio alphas: unique positive root of
        // x^(m+1) = x + 1.
        let mut phi = 1.5f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (coords as f64 + 1.0));
        }
        let alphas: Vec<f64> = (1..=coords).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect();

        let directions: Vec<Vec<f64>> = (0..count)
            .map(|k| {
                let mut gauss = Vec::with_capacity(coords);
                for pair in 0..coords / 2 {
                    let u1 = (0.5 + (k as f64 + 1.0) * alphas[2 * pair]).fract().max(1e-12);
                    let u2 = (0.5 + (k as f64 + 1.0) * alphas[2 * pair + 1]).fract();
                    let rho = (-2.0 * u1.ln()).sqrt();
                    let ang = 2.0 * std::f64::consts::PI * u2;
                    gauss.push(rho * ang.cos());
                    gauss.push(rho * ang.sin());
                }
                gauss.truncate(dim);
                let norm = gauss.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                gauss.iter().map(|x| x / norm).collect()
            })
            .collect();

        // k nearest by angle = k largest dot products; symmetrized.
        let nearest: Vec<Vec<usize>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut best: Vec<(f64, usize)> = Vec::with_capacity(neighbors + 1);
                for j in 0..count {
                    if i == j {
                        continue;
                    }
                    let dot: f64 =
                        directions[i].iter().zip(&directions[j]).map(|(a, b)| a * b).sum();
                    if best.len() < neighbors {
                        best.push((dot, j));
                        best.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
                    } else if dot > best[neighbors - 1].0 {
                        best[neighbors - 1] = (dot, j);
                        best.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
                    }
                }
                best.into_iter().map(|(_, j)| j).collect()
            })
            .collect();
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (i, list) in nearest.iter().enumerate() {
            for &j in list {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        SphereSample { dim, directions, adjacency }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// The sample point `r * direction[i]`.
    pub fn point(&self, i: usize, r: f64) -> Vec<f64> {
        self.directions[i].iter().map(|x| x * r).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_sample_is_unit_and_symmetric() {
        let s = SphereSample::uniform_circle(64, 8);
        for d in s.directions() {
            let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
        for (i, adj) in s.adjacency().iter().enumerate() {
            assert_eq!(adj.len(), 8);
            for &j in adj {
                assert!(s.neighbors(j).contains(&i), "adjacency must be symmetric");
            }
        }
    }

    #[test]
    fn quasi_random_sample_is_unit_and_symmetric() {
        let s = SphereSample::quasi_random(3, 500, 8);
        for d in s.directions() {
            let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
        for (i, adj) in s.adjacency().iter().enumerate() {
            for &j in adj {
                assert!(s.neighbors(j).contains(&i));
            }
        }
        // deterministic: rebuilding gives the same directions
        let s2 = SphereSample::quasi_random(3, 500, 8);
        assert_eq!(s.directions(), s2.directions());
    }

    #[test]
    fn dim1_sample_is_disconnected() {
        let p = AnalysisParams::default();
        let s = SphereSample::standard(1, &p);
        assert_eq!(s.len(), 2);
        assert!(s.neighbors(0).is_empty() && s.neighbors(1).is_empty());
        assert_eq!(s.point(1, 0.25), vec![-0.25]);
    }
}
