//! The two-speed flip process and its analytic continuations.
//!
//! A density of right/left movers at speed c with Poisson direction flips at
//! rate a obeys the telegraph pair
//!
//!   dP+/dt = -a (P+ - P-) - c dP+/dx,
//!   dP-/dt = -a (P- - P+) + c dP-/dx.
//!
//! Continuing the flip rate to a -> i m c^2 / hbar turns the densities into
//! the two components of a relativistic amplitude:
//!
//!   i hbar dpsi/dt = m c^2 sigma_x psi - i c hbar sigma_z dpsi/dx,
//!
//! and the same continuation applied to a three-component field pair gives
//! the six-component photon-like equation with a helicity-flipping mass term.
//!
//! [`telegraph`] integrates the real pair (grid PDE and Monte Carlo walkers),
//! [`checkerboard`] sums the underlying direction histories on a light-cone
//! lattice for real or continued flip weights, [`spectral`] solves the
//! two-component equation exactly per Fourier mode, [`rs_photon`] does the
//! same for the six-component field, and [`studies`] measures how the lattice
//! converges to the spectral solution and how the massive field approaches
//! the massless one.

pub mod checkerboard;
pub mod io;
pub mod rs_photon;
pub mod spectral;
pub mod studies;
pub mod telegraph;

pub use checkerboard::{enumerate_paths, CheckerboardLattice};
pub use io::{
    write_complex_snapshot, write_rs_snapshot, write_spinor_snapshot, write_telegraph_snapshot,
};
pub use rs_photon::{
    beta_matrix, h_matrix, helicity_vector, sigma_z_matrix, RsDiracPropagator, RsDiracState,
};
pub use spectral::{dispersion_frequency, WeylPropagator, WeylSpinor};
pub use studies::{
    checkerboard_vs_dirac, massless_limit_study, CheckerboardStudyConfig, ConvergenceReport,
    MasslessLimitReport,
};
pub use telegraph::{telegraph_monte_carlo, McTelegraph, TelegraphState};
