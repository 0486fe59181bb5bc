//! Reference Schrodinger dynamics and the map between wavefunctions and
//! drift fields.
//!
//! A wavefunction psi = exp(R + iS/hbar) carries a density rho = |psi|^2 and
//! two velocity fields,
//!
//! ```text
//! u = (hbar/2m) d/dx ln(rho)      (osmotic)
//! v = (1/m)     d/dx S            (current)
//! ```
//!
//! which are exactly the half-sum/half-difference of the forward and backward
//! drifts of the matching diffusion. This module owns the wave side: a
//! norm-preserving Crank-Nicolson propagator used as the oracle, the field
//! extraction, the quantum potential in both algebraic forms, a discrete
//! continuity check, and a detector for regions where the osmotic velocity
//! vanishes and the dynamics turns classical.

mod fields;
mod io;
mod solver;
mod states;

pub use fields::{
    collapse_detector, continuity_residual, nelson_map, osmotic_velocity, quantum_potential,
    quantum_potential_from_density, CollapseReport, ContinuityReport, NelsonFields,
};
pub use io::write_nelson_snapshot_csv;
pub use solver::{default_dt, CrankNicolson};
pub use states::{
    free_gaussian_analytic, free_packet_variance, gaussian_packet, harmonic_ground_state, Potential,
};
