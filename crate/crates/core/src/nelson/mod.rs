//! Particle-ensemble side of the diffusion picture.
//!
//! A wavefunction fixes two velocity fields (see [`crate::schrodinger`]): the
//! current velocity v and the osmotic velocity u. This module integrates the
//! paired Ito processes
//!
//!   dX = (v + u) dt + sigma dW_f      (forward)
//!   dX = (v - u) dt + sigma dW_b      (backward)
//!
//! with sigma^2 = hbar/m, whose one-time densities obey the transport pair
//!
//!   d rho/dt = -d/dx[(v +/- u) rho] +/- (sigma^2/2) d^2 rho/dx^2,
//!
//! and checks that the empirical particle density tracks |psi|^2. The
//! imbalance measure integral |u| rho dx quantifies how far the two processes
//! disagree; it vanishing is the classical-transport limit.

mod ensemble;
mod io;
mod observables;

pub use ensemble::{DriftSpec, Ensemble};
pub use io::TrajectoryRecorder;
pub use observables::{
    empirical_density, fokker_planck_residual, quantum_classical_transition, Direction,
    ImbalanceReport,
};
