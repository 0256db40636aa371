//! Constructive search for a trajectory asymptotic to the equilibrium:
//! shoot from a schedule of seeds converging to the origin inside the region
//! `U = {(q,p) : Π(q) < 0, <q,p> > 0, |(q,p)| < ε, H < 0}`, collect the exit
//! points through the sphere `|(q,p)| = ε`, and integrate backward from the
//! limit of the exits. Backward time plays the role of the limit `t → −∞`.

use super::integrator::{
    integrate, project_momentum, Direction, State, StepControl, Stepper, Trajectory,
};
use super::system::{DynamicsError, HamiltonianSystem};
use serde::Serialize;

/// Phase-space region the shooting runs in. The negative-potential component
/// is represented by the sign predicate Π(q) < 0; seeds are placed along a
/// certified tangent direction, which pins the component being used.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KrasovskiiRegion {
    pub eps: f64,
}

impl KrasovskiiRegion {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0);
        KrasovskiiRegion { eps }
    }

    /// Why `(q, p)` fails to lie in `U`, if it does.
    pub fn violation(&self, sys: &HamiltonianSystem, q: &[f64], p: &[f64]) -> Option<&'static str> {
        if sys.potential().value(q) >= 0.0 {
            return Some("potential is nonnegative at q");
        }
        let qp: f64 = q.iter().zip(p).map(|(a, b)| a * b).sum();
        if qp <= 0.0 {
            return Some("<q, p> is nonpositive");
        }
        let norm = q.iter().chain(p).map(|x| x * x).sum::<f64>().sqrt();
        if norm >= self.eps {
            return Some("|(q, p)| is not below eps");
        }
        if sys.hamiltonian(q, p) >= 0.0 {
            return Some("energy is nonnegative");
        }
        None
    }

    pub fn contains(&self, sys: &HamiltonianSystem, q: &[f64], p: &[f64]) -> bool {
        self.violation(sys, q, p).is_none()
    }
}

/// Exit of one shooting run through the sphere `|(q,p)| = ε`.
#[derive(Clone, Debug, Serialize)]
pub struct EscapeInfo {
    pub exit: State,
    pub t_exit: f64,
    /// V decreased strictly at every accepted step.
    pub v_monotone: bool,
    /// Largest W along the arc, as shell energy times the smallest <q,p>
    /// (must stay negative in U).
    pub w_max: f64,
    pub accepted_steps: usize,
}

/// Integrates forward from a state inside `U` until the trajectory crosses
/// the sphere `|(q,p)| = ε`, refining the crossing by bisection on the final
/// step to within 1e-10. Monitors that `W < 0` throughout (the trajectory
/// cannot re-enter the boundary of `U`, where `W = 0`) and that `V` strictly
/// decreases.
///
/// Running out of the step budget before exiting signals that the descent
/// assumption on `V` failed numerically and is reported as an error.
pub fn escape_time(
    sys: &HamiltonianSystem,
    region: &KrasovskiiRegion,
    start: &State,
    ctrl: &StepControl,
) -> Result<EscapeInfo, DynamicsError> {
    if let Some(reason) = region.violation(sys, &start.q, &start.p) {
        return Err(DynamicsError::StartOutsideRegion(reason));
    }
    let stepper = Stepper::new(sys, Direction::Forward);
    let n = sys.dim();
    // the orbit's true invariant: keep the numerical arc on this shell
    let shell = sys.hamiltonian(&start.q, &start.p);
    let mut y: Vec<f64> = start.q.iter().chain(&start.p).copied().collect();
    let mut k1 = stepper.f(&y);
    let mut t = 0.0f64;
    let mut h = stepper.initial_step(&y, ctrl);
    let norm_of = |y: &[f64]| y.iter().map(|x| x * x).sum::<f64>().sqrt();

    // With the energy pinned to the shell, W = <q,p>·H can only vanish
    // through <q,p> = 0, so the boundary monitor tracks the smallest <q,p>
    // along the arc and reports W against the shell energy (re-evaluating H
    // in floats would drown thin shells in rounding noise near the sphere).
    let qp_of = |y: &[f64]| -> f64 { y[..n].iter().zip(&y[n..]).map(|(a, b)| a * b).sum() };
    let mut v_prev = -qp_of(&y);
    let mut min_qp = qp_of(&y);
    let mut v_monotone = true;
    let mut accepted = 0usize;
    let mut attempts = 0usize;

    loop {
        attempts += 1;
        if attempts >= ctrl.max_steps {
            return Err(DynamicsError::StepBudget(ctrl.max_steps));
        }
        if h < 1e-16 {
            return Err(DynamicsError::StepUnderflow(h));
        }
        let (y5, err, k_last) = stepper.step(&y, &k1, h, ctrl);
        if !y5.iter().all(|v| v.is_finite()) {
            return Err(DynamicsError::NonFiniteState);
        }
        if err <= 1.0 {
            if norm_of(&y5) >= region.eps {
                // bisect the step size until the crossing is pinned
                let (mut lo, mut hi) = (0.0f64, h);
                let mut best = y5.clone();
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let (ym, _, _) = stepper.step(&y, &k1, mid, ctrl);
                    if norm_of(&ym) >= region.eps {
                        hi = mid;
                        best = ym;
                    } else {
                        lo = mid;
                    }
                    if (norm_of(&best) - region.eps).abs() <= 1e-10 {
                        break;
                    }
                }
                let t_exit = t + hi;
                let exit = State::new(start.t + t_exit, best[..n].to_vec(), best[n..].to_vec());
                let qp = qp_of(&best);
                if -qp >= v_prev {
                    v_monotone = false;
                }
                min_qp = min_qp.min(qp);
                let w_max = shell * min_qp;
                return Ok(EscapeInfo { exit, t_exit, v_monotone, w_max, accepted_steps: accepted });
            }
            t += h;
            y = y5;
            if let Some(p) = project_momentum(sys, &y[..n], &y[n..], shell) {
                y[n..].copy_from_slice(&p);
                k1 = stepper.f(&y);
            } else {
                k1 = k_last;
            }
            accepted += 1;
            let qp = qp_of(&y);
            if -qp >= v_prev {
                v_monotone = false;
            }
            v_prev = -qp;
            min_qp = min_qp.min(qp);
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
}

/// Seed schedule and success thresholds for the asymptotic-trajectory search.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeedSchedule {
    /// Seeds at |x_k| = ε·2^-k for k in k_min..=k_max.
    pub k_min: u32,
    pub k_max: u32,
    /// Backward duration = factor · T_exit(k_max).
    pub t_back_factor: f64,
    /// Exit points must agree within factor·ε on the tail of the schedule.
    pub cauchy_tol_factor: f64,
    /// Success requires the final backward state below factor·ε.
    pub final_norm_factor: f64,
}

impl Default for SeedSchedule {
    fn default() -> Self {
        SeedSchedule {
            k_min: 2,
            k_max: 10,
            t_back_factor: 10.0,
            cauchy_tol_factor: 1e-3,
            final_norm_factor: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrajectoryVerdict {
    Found,
    Inconclusive,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExitRecord {
    pub k: u32,
    pub seed: State,
    pub exit: State,
    pub t_exit: f64,
    /// V decreased strictly at every accepted step of the escape arc.
    pub v_monotone: bool,
    /// Largest W observed on the escape arc (negative inside the region).
    pub w_max: f64,
}

/// Everything the search produced, including the backward trajectory.
#[derive(Clone, Debug)]
pub struct AsymptoticResult {
    pub exits: Vec<ExitRecord>,
    pub exit_times_increasing: bool,
    pub cauchy_max: f64,
    pub cauchy_ok: bool,
    pub backward: Trajectory,
    pub final_norm: f64,
    pub decay_monotone: bool,
    pub v_monotone_along_flow: bool,
    pub stayed_in_closure: bool,
    pub loglog_slope: Option<f64>,
    pub verdict: TrajectoryVerdict,
    pub notes: Vec<String>,
    /// Step control the arcs were integrated with, echoed into reports.
    pub control: StepControl,
}

/// Serializable summary (the trajectory itself goes to CSV).
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub verdict: TrajectoryVerdict,
    pub eps: f64,
    pub schedule: SeedSchedule,
    pub integrator: StepControl,
    pub direction: Vec<f64>,
    pub exit_table: Vec<ExitRecord>,
    pub exit_times_increasing: bool,
    pub cauchy_max: f64,
    pub cauchy_tolerance: f64,
    pub backward_duration: f64,
    pub final_norm: f64,
    pub final_norm_threshold: f64,
    pub decay_monotone: bool,
    pub v_monotone_along_flow: bool,
    pub stayed_in_closure: bool,
    pub loglog_slope: Option<f64>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl AsymptoticResult {
    pub fn convergence_report(
        &self,
        region: &KrasovskiiRegion,
        schedule: &SeedSchedule,
        direction: &[f64],
    ) -> ConvergenceReport {
        ConvergenceReport {
            verdict: self.verdict,
            eps: region.eps,
            schedule: *schedule,
            integrator: self.control,
            direction: direction.to_vec(),
            exit_table: self.exits.clone(),
            exit_times_increasing: self.exit_times_increasing,
            cauchy_max: self.cauchy_max,
            cauchy_tolerance: schedule.cauchy_tol_factor * region.eps,
            backward_duration: self.backward.duration(),
            final_norm: self.final_norm,
            final_norm_threshold: schedule.final_norm_factor * region.eps,
            decay_monotone: self.decay_monotone,
            v_monotone_along_flow: self.v_monotone_along_flow,
            stayed_in_closure: self.stayed_in_closure,
            loglog_slope: self.loglog_slope,
            notes: self.notes.clone(),
            timestamp: None,
        }
    }
}

fn state_distance(a: &State, b: &State) -> f64 {
    a.q.iter()
        .chain(&a.p)
        .zip(b.q.iter().chain(&b.p))
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Shoots from seeds `x_k` with `|x_k| = ε·2^-k` placed along `direction`
/// (momentum parallel to position, scaled down until the energy is
/// negative), collects the sphere exit points `y_k`, checks they are Cauchy,
/// and integrates backward from the last exit for `t_back_factor` times its
/// escape time.
///
/// Success means: the backward trajectory stays in the closed region,
/// `|q|` decays monotonically over the last half of backward time, the final
/// state is below `final_norm_factor·ε`, and `V` is strictly decreasing along
/// the forward direction of the recovered trajectory.
pub fn find_asymptotic_trajectory(
    sys: &HamiltonianSystem,
    region: &KrasovskiiRegion,
    direction: &[f64],
    schedule: &SeedSchedule,
    ctrl: &StepControl,
) -> Result<AsymptoticResult, DynamicsError> {
    assert_eq!(direction.len(), sys.dim());
    let mut notes = Vec::new();

    // Seeds along the tangent direction with momentum parallel to position.
    // The momentum scale λ is pushed toward the zero-energy boundary from
    // below: the limit trajectory of the construction lives on H = 0, and the
    // residual energy offset of a seed sets the turning scale of the backward
    // orbit, which must sit far below the success threshold.
    let mut exits: Vec<ExitRecord> = Vec::new();
    for k in schedule.k_min..=schedule.k_max {
        let target = region.eps * 0.5f64.powi(k as i32);
        let state_for = |lambda: f64| -> State {
            let qn = target / (1.0 + lambda * lambda).sqrt();
            let q: Vec<f64> = direction.iter().map(|u| qn * u).collect();
            let p: Vec<f64> = q.iter().map(|x| lambda * x).collect();
            State::new(0.0, q, p)
        };
        let energy_of = |lambda: f64| -> f64 {
            let st = state_for(lambda);
            sys.hamiltonian(&st.q, &st.p)
        };
        if sys.potential().value(&state_for(0.0).q) >= 0.0 {
            return Err(DynamicsError::SeedOutsideRegion(target));
        }
        // find any negative-energy momentum scale
        let mut lo = 1.0f64;
        let mut halvings = 0;
        while energy_of(lo) >= 0.0 {
            lo *= 0.5;
            halvings += 1;
            if halvings > 600 {
                return Err(DynamicsError::SeedOutsideRegion(target));
            }
        }
        // bracket the zero-energy boundary and bisect λ toward it, stopping
        // at a relative gap that keeps the seed energy decisively negative
        let mut hi = lo * 2.0;
        while energy_of(hi) < 0.0 && hi < 1e12 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            if hi - lo <= 1e-8 * lo {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if energy_of(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let seed = state_for(lo);
        debug_assert!(sys.hamiltonian(&seed.q, &seed.p) < 0.0);
        let info = escape_time(sys, region, &seed, ctrl)?;
        if !info.v_monotone {
            notes.push(format!("V failed to decrease strictly on the escape arc of seed {k}"));
        }
        if info.w_max >= 0.0 {
            notes.push(format!("W reached {:.3e} on the escape arc of seed {k}", info.w_max));
        }
        exits.push(ExitRecord {
            k,
            seed,
            exit: info.exit,
            t_exit: info.t_exit,
            v_monotone: info.v_monotone,
            w_max: info.w_max,
        });
    }

    let exit_times_increasing =
        exits.windows(2).all(|w| w[1].t_exit > w[0].t_exit);

    // Cauchy behavior of the exit tail.
    let tail_from = (schedule.k_min + schedule.k_max).div_ceil(2);
    let tail: Vec<&ExitRecord> = exits.iter().filter(|e| e.k >= tail_from).collect();
    let mut cauchy_max = 0.0f64;
    for i in 0..tail.len() {
        for j in (i + 1)..tail.len() {
            cauchy_max = cauchy_max.max(state_distance(&tail[i].exit, &tail[j].exit));
        }
    }
    let cauchy_tol = schedule.cauchy_tol_factor * region.eps;
    let cauchy_ok = cauchy_max <= cauchy_tol;

    // Backward integration from the limit of the exits, pinned to the energy
    // shell of the deepest seed (the construction's limit lives on H = 0;
    // the finite-schedule stand-in lives on the seed's shell).
    let last = exits.last().expect("nonempty schedule");
    let t_back = schedule.t_back_factor * last.t_exit;
    let anchor = State::new(0.0, last.exit.q.clone(), last.exit.p.clone());
    // the seed's energy is exact to rounding at the seed's tiny scale, far
    // sharper than re-evaluating H at the sphere
    let shell = sys.hamiltonian(&last.seed.q, &last.seed.p);
    let back_ctrl = StepControl {
        domain_bound: region.eps * (1.0 + 1e-6),
        energy_shell: Some(shell),
        ..*ctrl
    };
    let backward = integrate(sys, &anchor, t_back, Direction::Backward, &back_ctrl)?;
    let stayed_in_closure = !backward.flags.domain_exit && !backward.flags.budget_exhausted;
    if backward.flags.budget_exhausted {
        notes.push("backward step budget exhausted before the requested duration".into());
    }

    let final_norm = backward.end().norm();

    // Monotone decay of |q| over the last half of backward time.
    let t_mid = anchor.t - 0.5 * t_back;
    let tail_logs: Vec<f64> = backward
        .states
        .iter()
        .zip(&backward.logs)
        .filter(|(s, _)| s.t <= t_mid)
        .map(|(_, l)| l.q_norm)
        .collect();
    let decay_monotone = tail_logs.len() >= 2
        && tail_logs
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-9))
        && tail_logs.last().unwrap() < tail_logs.first().unwrap();

    // V strictly decreasing along the forward direction of the flow means
    // V increasing along the backward logs (tiny relative slack for fp ties).
    let v_monotone_along_flow = backward
        .logs
        .windows(2)
        .all(|w| w[1].v_aux >= w[0].v_aux - 1e-13 * w[0].v_aux.abs().max(w[1].v_aux.abs()));

    // log-log decay slope over the last half of backward time.
    let pts: Vec<(f64, f64)> = backward
        .states
        .iter()
        .zip(&backward.logs)
        .filter(|(s, l)| s.t <= t_mid && s.t < 0.0 && l.q_norm > 0.0)
        .map(|(s, l)| ((-s.t).ln(), l.q_norm.ln()))
        .collect();
    let loglog_slope = if pts.len() >= 8 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() > 1e-300 {
            Some((n * sxy - sx * sy) / denom)
        } else {
            None
        }
    } else {
        None
    };

    let final_ok = final_norm <= schedule.final_norm_factor * region.eps;
    let verdict = if !stayed_in_closure {
        notes.push("backward trajectory left the closed region".into());
        TrajectoryVerdict::Failed
    } else if !cauchy_ok {
        notes.push(format!(
            "exit points are not Cauchy within {:.3e} (observed {:.3e})",
            cauchy_tol, cauchy_max
        ));
        TrajectoryVerdict::Inconclusive
    } else if decay_monotone && final_ok && v_monotone_along_flow {
        TrajectoryVerdict::Found
    } else {
        if !decay_monotone {
            notes.push("backward |q| is not monotone over the last half of the run".into());
        }
        if !final_ok {
            notes.push(format!(
                "final backward norm {:.3e} above threshold {:.3e}",
                final_norm,
                schedule.final_norm_factor * region.eps
            ));
        }
        if !v_monotone_along_flow {
            notes.push("V is not strictly decreasing along the recovered trajectory".into());
        }
        TrajectoryVerdict::Failed
    };

    Ok(AsymptoticResult {
        exits,
        exit_times_increasing,
        cauchy_max,
        cauchy_ok,
        backward,
        final_norm,
        decay_monotone,
        v_monotone_along_flow,
        stayed_in_closure,
        loglog_slope,
        verdict,
        notes,
        control: *ctrl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::PotentialField;
    use crate::poly::{int, rat, Polynomial};

    fn linear_repeller() -> HamiltonianSystem {
        // Π = -(x² + y²): a linear repeller, exits in finite time
        HamiltonianSystem::unit_mass(
            PotentialField::from_polynomial(
                Polynomial::from_terms(2, vec![(vec![2, 0], int(-1)), (vec![0, 2], int(-1))])
                    .unwrap(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn linear_repeller_escapes() {
        let sys = linear_repeller();
        let region = KrasovskiiRegion::new(0.5);
        let delta = 0.01;
        let start = State::new(0.0, vec![delta, 0.0], vec![delta, 0.0]);
        let info = escape_time(&sys, &region, &start, &StepControl::default()).unwrap();
        assert!(info.t_exit > 0.0 && info.t_exit < 20.0);
        assert!((info.exit.norm() - 0.5).abs() <= 1e-9);
        assert!(info.v_monotone);
        assert!(info.w_max < 0.0);
    }

    #[test]
    fn escape_rejects_states_outside_the_region() {
        let sys = linear_repeller();
        let region = KrasovskiiRegion::new(0.5);
        // <q,p> <= 0
        let bad = State::new(0.0, vec![0.01, 0.0], vec![-0.01, 0.0]);
        assert!(matches!(
            escape_time(&sys, &region, &bad, &StepControl::default()),
            Err(DynamicsError::StartOutsideRegion(_))
        ));
    }

    #[test]
    fn stable_potential_has_no_seeds() {
        // Π = x² + y² has no negative region: the guard trips
        let sys = HamiltonianSystem::unit_mass(
            PotentialField::from_polynomial(
                Polynomial::from_terms(2, vec![(vec![2, 0], int(1)), (vec![0, 2], int(1))])
                    .unwrap(),
            )
            .unwrap(),
        );
        let region = KrasovskiiRegion::new(0.5);
        let err = find_asymptotic_trajectory(
            &sys,
            &region,
            &[1.0, 0.0],
            &SeedSchedule::default(),
            &StepControl::default(),
        )
        .unwrap_err();
        assert!(matches!(err, DynamicsError::SeedOutsideRegion(_)));
    }

    #[test]
    fn cubic_1d_recovers_the_analytic_family() {
        // Π = -x⁴/4: recovered trajectory must match x(t) = √2/(c − t)
        let sys = HamiltonianSystem::unit_mass(
            PotentialField::from_polynomial(Polynomial::term(1, &[4], rat(-1, 4))).unwrap(),
        );
        let region = KrasovskiiRegion::new(0.5);
        let schedule = SeedSchedule::default();
        let result = find_asymptotic_trajectory(
            &sys,
            &region,
            &[1.0],
            &schedule,
            &StepControl::default(),
        )
        .unwrap();
        assert_eq!(result.verdict, TrajectoryVerdict::Found, "notes: {:?}", result.notes);
        assert!(result.exit_times_increasing);
        let slope = result.loglog_slope.expect("slope available");
        assert!((slope + 1.0).abs() <= 0.05, "slope {slope}");

        // pointwise match at t = -90 against the family anchored at t = 0
        let c = std::f64::consts::SQRT_2 / result.backward.start().q[0];
        let at = result.backward.state_at(&sys, -90.0).expect("within duration");
        let expect = std::f64::consts::SQRT_2 / (c + 90.0);
        let rel = (at.q[0] - expect).abs() / expect;
        assert!(rel <= 1e-3, "relative error {rel:e}");
    }
}
