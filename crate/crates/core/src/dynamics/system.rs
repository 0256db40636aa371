//! The Hamiltonian system `H(q, p) = ½<Bp, p> + Π(q)` with a constant
//! symmetric positive-definite kinetic matrix.

use crate::analysis::PotentialField;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("kinetic matrix must be {dim}x{dim}")]
    KineticShape { dim: usize },
    #[error("kinetic matrix is not symmetric (|B[{i}][{j}] - B[{j}][{i}]| = {delta:e})")]
    NotSymmetric { i: usize, j: usize, delta: f64 },
    #[error("kinetic matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("state contains a non-finite component")]
    NonFiniteState,
    #[error("step size underflowed below {0:e}")]
    StepUnderflow(f64),
    #[error("step budget of {0} exceeded before the trajectory left the region")]
    StepBudget(usize),
    #[error("start state is outside the region: {0}")]
    StartOutsideRegion(&'static str),
    #[error("seed direction leaves the negative region at radius {0:e}")]
    SeedOutsideRegion(f64),
    #[error("dimension mismatch: state has {found}, system has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Lower-triangular Cholesky factor; fails on a nonpositive pivot.
#[allow(clippy::needless_range_loop)]
fn cholesky(b: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, DynamicsError> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = b[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(DynamicsError::NotPositiveDefinite { row: i, pivot: sum });
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Conservative system: potential plus a constant kinetic quadratic form.
///
/// With constant `B` the kinetic energy has no position dependence, so the
/// momentum equation reduces to `ṗ = −∇Π(q)` and the auxiliary-function
/// derivatives lose their `∂T/∂q` terms. Immutable after construction.
#[derive(Clone, Debug)]
pub struct HamiltonianSystem {
    potential: PotentialField,
    kinetic: Vec<Vec<f64>>,
}

impl HamiltonianSystem {
    /// Validates shape, symmetry (within 1e-12) and positive definiteness
    /// (by attempted Cholesky factorization).
    #[allow(clippy::needless_range_loop)]
    pub fn new(potential: PotentialField, kinetic: Vec<Vec<f64>>) -> Result<Self, DynamicsError> {
        let dim = potential.dim();
        if kinetic.len() != dim || kinetic.iter().any(|row| row.len() != dim) {
            return Err(DynamicsError::KineticShape { dim });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let delta = (kinetic[i][j] - kinetic[j][i]).abs();
                if delta > 1e-12 {
                    return Err(DynamicsError::NotSymmetric { i, j, delta });
                }
            }
        }
        cholesky(&kinetic)?;
        Ok(HamiltonianSystem { potential, kinetic })
    }

    /// Identity kinetic matrix.
    pub fn unit_mass(potential: PotentialField) -> Self {
        let dim = potential.dim();
        let kinetic = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        HamiltonianSystem { potential, kinetic }
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    pub fn potential(&self) -> &PotentialField {
        &self.potential
    }

    pub fn kinetic_matrix(&self) -> &[Vec<f64>] {
        &self.kinetic
    }

    /// `B p`.
    pub fn momentum_velocity(&self, p: &[f64]) -> Vec<f64> {
        self.kinetic
            .iter()
            .map(|row| row.iter().zip(p).map(|(b, pk)| b * pk).sum())
            .collect()
    }

    /// Kinetic energy `T = ½ <Bp, p>`.
    pub fn kinetic_energy(&self, p: &[f64]) -> f64 {
        0.5 * self
            .momentum_velocity(p)
            .iter()
            .zip(p)
            .map(|(bp, pk)| bp * pk)
            .sum::<f64>()
    }

    /// Total energy `H = T + Π`.
    pub fn hamiltonian(&self, q: &[f64], p: &[f64]) -> f64 {
        self.kinetic_energy(p) + self.potential.value(q)
    }

    /// The Hamiltonian vector field: `q̇ = B p`, `ṗ = −∇Π(q)`.
    pub fn vector_field(&self, q: &[f64], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let qdot = self.momentum_velocity(p);
        let pdot = self.potential.gradient(q).into_iter().map(|g| -g).collect();
        (qdot, pdot)
    }

    /// Auxiliary functions `V = −<q, p>` and `W = <q, p>·H`.
    pub fn auxiliaries(&self, q: &[f64], p: &[f64]) -> (f64, f64) {
        let qp: f64 = q.iter().zip(p).map(|(a, b)| a * b).sum();
        let h = self.hamiltonian(q, p);
        (-qp, qp * h)
    }

    /// Analytic derivatives along the flow:
    /// `V̇ = −[2T − R_Π(q)]` and `Ẇ = [2T − R_Π(q)]·H`
    /// (the `∂T/∂q` term vanishes for constant kinetic matrices).
    pub fn auxiliary_derivatives(&self, q: &[f64], p: &[f64]) -> (f64, f64) {
        let bracket = 2.0 * self.kinetic_energy(p) - self.potential.radial(q);
        let h = self.hamiltonian(q, p);
        (-bracket, bracket * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat, Polynomial};

    fn quartic_1d() -> PotentialField {
        // Π = -x^4/4
        PotentialField::from_polynomial(Polynomial::term(1, &[4], rat(-1, 4))).unwrap()
    }

    #[test]
    fn kinetic_matrix_validation() {
        let field = || {
            PotentialField::from_polynomial(
                Polynomial::from_terms(2, vec![(vec![2, 0], int(1)), (vec![0, 2], int(1))])
                    .unwrap(),
            )
            .unwrap()
        };
        assert!(HamiltonianSystem::new(field(), vec![vec![2.0, 0.0], vec![0.0, 1.0]]).is_ok());
        assert!(matches!(
            HamiltonianSystem::new(field(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            Err(DynamicsError::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            HamiltonianSystem::new(field(), vec![vec![1.0, 0.5], vec![0.3, 1.0]]),
            Err(DynamicsError::NotSymmetric { .. })
        ));
        assert!(matches!(
            HamiltonianSystem::new(field(), vec![vec![1.0]]),
            Err(DynamicsError::KineticShape { .. })
        ));
    }

    #[test]
    fn vector_field_cases() {
        // equilibrium at the origin
        let sys = HamiltonianSystem::unit_mass(quartic_1d());
        let (qd, pd) = sys.vector_field(&[0.0], &[0.0]);
        assert_eq!((qd[0], pd[0]), (0.0, 0.0));

        // Π = -x^4/4 gives ṗ = x³
        let (qd, pd) = sys.vector_field(&[0.5], &[0.25]);
        assert!((qd[0] - 0.25).abs() < 1e-15);
        assert!((pd[0] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_partials_match_finite_differences() {
        let sys = HamiltonianSystem::unit_mass(quartic_1d());
        let (q, p) = ([0.4], [0.3]);
        let d = 1e-6;
        let dh_dq = (sys.hamiltonian(&[q[0] + d], &p) - sys.hamiltonian(&[q[0] - d], &p)) / (2.0 * d);
        let dh_dp = (sys.hamiltonian(&q, &[p[0] + d]) - sys.hamiltonian(&q, &[p[0] - d])) / (2.0 * d);
        let (qdot, pdot) = sys.vector_field(&q, &p);
        assert!((qdot[0] - dh_dp).abs() < 1e-6);
        assert!((pdot[0] + dh_dq).abs() < 1e-6);
    }

    #[test]
    fn w_derivative_nonpositive_inside_the_region() {
        // inside U the energy is negative and 2T - R_Pi is positive, so
        // W-dot = (2T - R_Pi)·H stays nonpositive
        let well = Polynomial::from_terms(2, vec![(vec![4, 0], int(-1)), (vec![0, 4], int(-1))])
            .unwrap();
        let sys = HamiltonianSystem::unit_mass(PotentialField::from_polynomial(well).unwrap());
        let mut count = 0;
        let mut k: u64 = 1;
        while count < 200 {
            // deterministic scan of candidate states
            k = k.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let f = |shift: u64| ((k >> shift) & 0xffff) as f64 / 65536.0 - 0.5;
            let q = [f(0) * 0.6, f(16) * 0.6];
            let p = [f(32) * 0.6, f(48) * 0.6];
            let qp: f64 = q.iter().zip(&p).map(|(a, b)| a * b).sum();
            let norm = (q.iter().chain(&p).map(|x| x * x).sum::<f64>()).sqrt();
            let in_u = sys.potential().value(&q) < 0.0
                && qp > 0.0
                && norm < 0.5
                && sys.hamiltonian(&q, &p) < 0.0;
            if !in_u {
                continue;
            }
            let (_, wdot) = sys.auxiliary_derivatives(&q, &p);
            assert!(wdot <= 0.0, "W-dot = {wdot} at q {q:?}, p {p:?}");
            count += 1;
        }
    }

    #[test]
    fn auxiliary_derivative_at_zero_momentum() {
        // at p = 0 in the region where R_Π < 0: V̇ = R_Π(q) < 0
        let sys = HamiltonianSystem::unit_mass(quartic_1d());
        let q = [0.3];
        let (vdot, wdot) = sys.auxiliary_derivatives(&q, &[0.0]);
        let r = sys.potential().radial(&q);
        assert!((vdot - r).abs() < 1e-15);
        assert!(r < 0.0);
        // Ẇ = (2T − R_Π)·H = −R_Π·H at p = 0
        let h = sys.hamiltonian(&q, &[0.0]);
        assert!((wdot + r * h).abs() < 1e-15);
    }
}
