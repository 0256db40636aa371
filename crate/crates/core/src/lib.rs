//! Instability analysis for Hamiltonian equilibria whose potential energy is
//! known through its polynomial jet.
//!
//! The toolkit has four layers:
//!
//! * [`poly`] — exact sparse multivariate polynomials over arbitrary-precision
//!   rationals: homogeneous decompositions, jets, radial derivatives, ray and
//!   curve restrictions.
//! * [`analysis`] — sampling-based verification of the jet hypotheses
//!   (lower jets nonnegative, jet certifies no minimum, negative jet component
//!   inside the negative radial-derivative region), tangent-cone direction
//!   finding, strict Cetaev certification and the auxiliary region
//!   `W = {Q < 0}` with its sandwich check.
//! * [`dynamics`] — Hamiltonian integration and the Krasovskii-style
//!   construction of trajectories asymptotic to the equilibrium (shooting from
//!   a seed schedule, collecting sphere exit points, integrating backward from
//!   their limit).
//! * [`corpus`] — a built-in catalog of potentials with expected verdicts and
//!   an exact verification of every computation in the published worked
//!   example this toolkit accompanies.
//!
//! Verdicts are three-valued (`Certified` / `Refuted` / `Inconclusive`):
//! sampling can refute with a concrete witness but can certify only up to a
//! stated margin and density.

pub mod analysis;
pub mod corpus;
pub mod dynamics;
pub mod poly;
pub mod report;
pub mod spec_format;

pub use poly::{JetDecomposition, Monomial, PolyError, Polynomial, Rational};
pub use report::Verdict;
