//! Hamiltonian integration and the constructive search for trajectories
//! asymptotic to the equilibrium.

mod integrator;
mod krasovskii;
mod system;

pub use integrator::{
    integrate, trajectory_to_csv, Direction, IntegrationFlags, State, StateLog, StepControl,
    Trajectory,
};
pub use krasovskii::{
    escape_time, find_asymptotic_trajectory, AsymptoticResult, ConvergenceReport, EscapeInfo,
    ExitRecord, KrasovskiiRegion, SeedSchedule, TrajectoryVerdict,
};
pub use system::{DynamicsError, HamiltonianSystem};
