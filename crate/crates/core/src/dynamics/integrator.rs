//! Adaptive embedded Runge–Kutta integration of the Hamiltonian flow.
//!
//! Dormand–Prince 5(4) pair with PI-free elementary step control: not
//! symplectic, but the trajectories here are short and energy drift is
//! monitored explicitly in the logs; adaptivity is what matters near the
//! degenerate equilibrium.

use super::system::{DynamicsError, HamiltonianSystem};
use serde::Serialize;

/// Phase-space state at one time stamp.
#[derive(Clone, Debug, Serialize)]
pub struct State {
    pub t: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl State {
    pub fn new(t: f64, q: Vec<f64>, p: Vec<f64>) -> Self {
        State { t, q, p }
    }

    pub fn norm(&self) -> f64 {
        self.q
            .iter()
            .chain(&self.p)
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn q_norm(&self) -> f64 {
        self.q.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn p_norm(&self) -> f64 {
        self.p.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.q.iter().chain(&self.p).all(|x| x.is_finite())
    }
}

/// Per-state log: energy, the auxiliary functions, and the norms.
#[derive(Clone, Debug, Serialize)]
pub struct StateLog {
    pub energy: f64,
    pub v_aux: f64,
    pub w_aux: f64,
    pub q_norm: f64,
    pub p_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// Step-size control for the embedded pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Integration halts (with a flag) once |q| exceeds this bound.
    pub domain_bound: f64,
    /// When set, the momentum is rescaled onto the energy shell `H = shell`
    /// after every accepted step. Orbits shadowing the degenerate unstable
    /// manifold sit on shells thinner than the integrator's drift; the
    /// shooting construction pins them this way, while plain integration
    /// leaves the drift visible in the logs.
    pub energy_shell: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 2_000_000,
            domain_bound: 16.0,
            energy_shell: None,
        }
    }
}

/// Rescales `p` so that `H(q, p)` lands on the given shell, when the target
/// kinetic energy is representable (both current and target strictly
/// positive). Returns `None` otherwise.
pub(super) fn project_momentum(
    sys: &HamiltonianSystem,
    q: &[f64],
    p: &[f64],
    shell: f64,
) -> Option<Vec<f64>> {
    let target = shell - sys.potential().value(q);
    let current = sys.kinetic_energy(p);
    if target > 0.0 && current > 0.0 {
        let scale = (target / current).sqrt();
        Some(p.iter().map(|x| x * scale).collect())
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct IntegrationFlags {
    /// Step size underflowed; the trajectory is partial.
    pub step_underflow: bool,
    /// |q| exceeded the domain bound; the trajectory stops there.
    pub domain_exit: bool,
    /// The step budget ran out before the requested duration.
    pub budget_exhausted: bool,
}

/// Time-ordered states with per-state logs.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub logs: Vec<StateLog>,
    pub flags: IntegrationFlags,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn start(&self) -> &State {
        self.states.first().expect("trajectory never empty")
    }

    pub fn end(&self) -> &State {
        self.states.last().expect("trajectory never empty")
    }

    pub fn duration(&self) -> f64 {
        (self.end().t - self.start().t).abs()
    }

    /// Cubic Hermite interpolation at time `t` (between logged states),
    /// re-deriving endpoint slopes from the vector field.
    pub fn state_at(&self, sys: &HamiltonianSystem, t: f64) -> Option<State> {
        let first = self.start().t;
        let last = self.end().t;
        let (lo, hi) = if first <= last { (first, last) } else { (last, first) };
        if t < lo - 1e-12 || t > hi + 1e-12 {
            return None;
        }
        let increasing = last >= first;
        let idx = self
            .states
            .windows(2)
            .position(|w| {
                if increasing {
                    w[0].t <= t && t <= w[1].t
                } else {
                    w[1].t <= t && t <= w[0].t
                }
            })
            .unwrap_or(self.states.len() - 2);
        let a = &self.states[idx];
        let b = &self.states[idx + 1];
        let h = b.t - a.t;
        if h.abs() < 1e-300 {
            return Some(a.clone());
        }
        let s = (t - a.t) / h;
        let (fa_q, fa_p) = sys.vector_field(&a.q, &a.p);
        let (fb_q, fb_p) = sys.vector_field(&b.q, &b.p);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let interp = |ya: &[f64], yb: &[f64], da: &[f64], db: &[f64]| -> Vec<f64> {
            ya.iter()
                .zip(yb)
                .zip(da.iter().zip(db))
                .map(|((&ya, &yb), (&da, &db))| {
                    h00 * ya + h10 * h * da + h01 * yb + h11 * h * db
                })
                .collect()
        };
        Some(State {
            t,
            q: interp(&a.q, &b.q, &fa_q, &fb_q),
            p: interp(&a.p, &b.p, &fa_p, &fb_p),
        })
    }
}

// Dormand–Prince 5(4) coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub(super) struct Stepper<'a> {
    sys: &'a HamiltonianSystem,
    sign: f64,
    n: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(sys: &'a HamiltonianSystem, direction: Direction) -> Self {
        let sign = match direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        };
        Stepper { sys, sign, n: sys.dim() }
    }

    pub(super) fn f(&self, y: &[f64]) -> Vec<f64> {
        let (q, p) = y.split_at(self.n);
        let (qdot, pdot) = self.sys.vector_field(q, p);
        qdot.into_iter()
            .chain(pdot)
            .map(|v| self.sign * v)
            .collect()
    }

    /// One embedded step of size `h` from `y`; returns (y5, error_norm, k1).
    #[allow(clippy::needless_range_loop)]
    pub fn step(&self, y: &[f64], k1: &[f64], h: f64, ctrl: &StepControl) -> (Vec<f64>, f64, Vec<f64>) {
        let dim = y.len();
        let mut k = vec![k1.to_vec()];
        for stage in 0..6 {
            let mut ys = y.to_vec();
            for (j, kj) in k.iter().enumerate() {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..dim {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k.push(self.f(&ys));
        }
        let mut y5 = y.to_vec();
        let mut err = vec![0.0; dim];
        for (j, kj) in k.iter().enumerate() {
            let (b5, b4) = (B5[j], B4[j]);
            for i in 0..dim {
                y5[i] += h * b5 * kj[i];
                err[i] += h * (b5 - b4) * kj[i];
            }
        }
        let mut err_norm = 0.0f64;
        for i in 0..dim {
            let scale = ctrl.atol + ctrl.rtol * y[i].abs().max(y5[i].abs());
            let e = err[i] / scale;
            err_norm += e * e;
        }
        err_norm = (err_norm / dim as f64).sqrt();
        // FSAL: k[6] is the derivative at y5
        (y5, err_norm, k.pop().unwrap())
    }

    pub fn initial_step(&self, y: &[f64], ctrl: &StepControl) -> f64 {
        let f0 = self.f(y);
        let ynorm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        let fnorm = f0.iter().map(|x| x * x).sum::<f64>().sqrt();
        let h = if fnorm > 1e-300 {
            0.01 * (ynorm.max(ctrl.atol) / fnorm)
        } else {
            1e-6
        };
        h.clamp(1e-12, 0.1)
    }
}

fn pack(state: &State) -> Vec<f64> {
    state.q.iter().chain(&state.p).copied().collect()
}

fn unpack(t: f64, y: &[f64], n: usize) -> State {
    State { t, q: y[..n].to_vec(), p: y[n..].to_vec() }
}

/// Integrates for duration `t_span > 0` in the given direction with adaptive
/// steps, logging energy and the auxiliary functions at every accepted step.
///
/// Early halts (domain bound, step underflow, budget) return the partial
/// trajectory with the corresponding flag set; a non-finite state is a hard
/// error.
pub fn integrate(
    sys: &HamiltonianSystem,
    start: &State,
    t_span: f64,
    direction: Direction,
    ctrl: &StepControl,
) -> Result<Trajectory, DynamicsError> {
    assert!(t_span > 0.0, "duration must be positive");
    if start.q.len() != sys.dim() || start.p.len() != sys.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: sys.dim(),
            found: start.q.len(),
        });
    }
    if !start.is_finite() {
        return Err(DynamicsError::NonFiniteState);
    }
    let stepper = Stepper::new(sys, direction);
    let n = sys.dim();
    let mut y = pack(start);
    let mut k1 = stepper.f(&y);
    let mut tau = 0.0; // elapsed duration, always positive
    let mut h = stepper.initial_step(&y, ctrl).min(t_span);
    let sign = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };

    let mut states = vec![start.clone()];
    let log_of = |st: &State| {
        let (v, w) = sys.auxiliaries(&st.q, &st.p);
        StateLog {
            energy: sys.hamiltonian(&st.q, &st.p),
            v_aux: v,
            w_aux: w,
            q_norm: st.q_norm(),
            p_norm: st.p_norm(),
        }
    };
    let mut logs = vec![log_of(start)];
    let mut flags = IntegrationFlags::default();
    let mut accepted = 0usize;
    let mut rejected = 0usize;

    while tau < t_span {
        if accepted + rejected >= ctrl.max_steps {
            flags.budget_exhausted = true;
            break;
        }
        h = h.min(t_span - tau);
        if h < 1e-14 * tau.max(1.0) {
            flags.step_underflow = true;
            break;
        }
        let (y5, err, k_last) = stepper.step(&y, &k1, h, ctrl);
        if !y5.iter().all(|v| v.is_finite()) {
            return Err(DynamicsError::NonFiniteState);
        }
        if err <= 1.0 {
            tau += h;
            y = y5;
            if let Some(shell) = ctrl.energy_shell {
                if let Some(p) = project_momentum(sys, &y[..n], &y[n..], shell) {
                    y[n..].copy_from_slice(&p);
                }
            }
            k1 = if ctrl.energy_shell.is_some() { stepper.f(&y) } else { k_last };
            let st = unpack(start.t + sign * tau, &y, n);
            logs.push(log_of(&st));
            states.push(st);
            accepted += 1;
            let qn = states.last().unwrap().q_norm();
            if qn > ctrl.domain_bound {
                flags.domain_exit = true;
                break;
            }
        } else {
            rejected += 1;
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }

    Ok(Trajectory { states, logs, flags, accepted_steps: accepted, rejected_steps: rejected })
}

/// CSV export: header `t,q1..qn,p1..pn,H,V,W`, 17 significant digits.
pub fn trajectory_to_csv(traj: &Trajectory, dim: usize) -> String {
    let mut out = String::from("t");
    for i in 1..=dim {
        out.push_str(&format!(",q{i}"));
    }
    for i in 1..=dim {
        out.push_str(&format!(",p{i}"));
    }
    out.push_str(",H,V,W\n");
    for (state, log) in traj.states.iter().zip(&traj.logs) {
        out.push_str(&format!("{:.16e}", state.t));
        for v in state.q.iter().chain(&state.p) {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push_str(&format!(",{:.16e},{:.16e},{:.16e}\n", log.energy, log.v_aux, log.w_aux));
    }
    out
}
