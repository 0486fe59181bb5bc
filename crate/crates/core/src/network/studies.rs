//! Continuum comparison: a ring network against the light-cone lattice.
//!
//! With the flip rate at zero both systems transport a packet at constant
//! speed, so they can be compared directly. The ring's downstream hop
//! T(e_k) = (c/dx)(psi_{k+1} - psi_k) is a one-sided difference whose
//! continuum limit is c d/dx, carrying the amplitude toward -x with an
//! O(dx) diffusive error; the lattice moves its left-moving component by
//! exactly one site per step. Refining dx and dt together therefore
//! converges at first order, and the fitted slope is the check that the
//! graph dynamics reproduces the continuum it discretizes.
//!
//! At nonzero flip rate the two systems genuinely differ: the hop drags both
//! helicities the same way while the lattice shifts them oppositely, so the
//! comparison is defined for free transport only.

use num_complex::Complex64;

use crate::dirac::{CheckerboardLattice, ConvergenceReport};
use crate::error::{Error, Result};
use crate::numerics::{Boundary, Grid1D};

use super::dynamics::{EdgeAmplitudes, NetworkDynamics, TransportModel};
use super::graph::SpinNetwork;

#[derive(Debug, Clone)]
pub struct ChainStudyConfig {
    pub x_min: f64,
    pub x_max: f64,
    /// Edge count on the coarsest rung; doubled per rung.
    pub base_edges: usize,
    /// Steps on the coarsest rung; doubled per rung so t_final is invariant.
    pub base_steps: usize,
    pub rungs: usize,
    pub speed: f64,
    pub packet_center: f64,
    pub packet_width: f64,
}

impl Default for ChainStudyConfig {
    fn default() -> Self {
        ChainStudyConfig {
            x_min: -8.0,
            x_max: 8.0,
            base_edges: 64,
            base_steps: 4,
            rungs: 4,
            speed: 1.0,
            packet_center: 0.0,
            packet_width: 1.5,
        }
    }
}

impl ChainStudyConfig {
    fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            problems.push(format!(
                "box [{}, {}] must be finite and ordered",
                self.x_min, self.x_max
            ));
        }
        if self.base_edges < 2 {
            problems.push(format!("base_edges = {} must be >= 2", self.base_edges));
        }
        if self.base_steps == 0 {
            problems.push("base_steps must be >= 1".to_string());
        }
        if self.rungs == 0 {
            problems.push("rungs must be >= 1".to_string());
        }
        if !(self.speed.is_finite() && self.speed > 0.0) {
            problems.push(format!("speed = {} must be > 0", self.speed));
        }
        if !(self.packet_width.is_finite() && self.packet_width > 0.0) {
            problems.push(format!("packet_width = {} must be > 0", self.packet_width));
        }
        if !self.packet_center.is_finite() {
            problems.push("packet_center must be finite".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

/// Runs the refinement ladder and fits the convergence order of the ring
/// against the lattice left-mover.
pub fn chain_vs_checkerboard(cfg: &ChainStudyConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let mut dts = Vec::with_capacity(cfg.rungs);
    let mut errors = Vec::with_capacity(cfg.rungs);
    for r in 0..cfg.rungs {
        let n = cfg.base_edges << r;
        let steps = cfg.base_steps << r;
        let grid = Grid1D::new(cfg.x_min, cfg.x_max, n, Boundary::Periodic)?;
        let dx = grid.dx();
        let dt = dx / cfg.speed;

        // Normalized Gaussian samples launched in the + helicity of the ring
        // and the left-moving component of the lattice.
        let mut packet: Vec<Complex64> = grid
            .points()
            .map(|x| {
                let u = (x - cfg.packet_center) / cfg.packet_width;
                Complex64::new((-0.5 * u * u).exp(), 0.0)
            })
            .collect();
        let norm = (packet.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt();
        if norm <= 0.0 {
            return Err(Error::DegenerateState(
                "packet vanished on the study grid".to_string(),
            ));
        }
        for z in &mut packet {
            *z /= norm;
        }

        let net = SpinNetwork::ring(n)?;
        let dynamics = NetworkDynamics::new(0.0)?.with_transport(TransportModel::Adjacency {
            hop_rate: cfg.speed / dx,
        });
        let mut amps = EdgeAmplitudes::new(packet.clone(), vec![Complex64::ZERO; n])?;
        for _ in 0..steps {
            amps = dynamics.continued_step(&net, &amps, dt)?;
        }

        let lattice = CheckerboardLattice::stochastic(grid, steps, cfg.speed, 0.0)?;
        let (_, minus) = lattice.propagate(&vec![Complex64::ZERO; n], &packet)?;

        let err = amps
            .plus()
            .iter()
            .zip(minus.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            * dx.sqrt();
        dts.push(dt);
        errors.push(err);
    }
    ConvergenceReport::from_errors(dts, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_transport_converges_to_the_lattice_left_mover() {
        let report = chain_vs_checkerboard(&ChainStudyConfig::default()).unwrap();
        for pair in report.l2_errors.windows(2) {
            assert!(
                pair[1] < pair[0],
                "errors must shrink: {:?}",
                report.l2_errors
            );
        }
        let order = report.fitted_order.expect("order fit");
        assert!(order >= 0.8, "fitted order {order}");
        assert!(order <= 1.35, "fitted order {order}");
    }

    #[test]
    fn config_problems_are_collected_together() {
        let cfg = ChainStudyConfig {
            x_min: 1.0,
            x_max: 0.0,
            base_edges: 1,
            base_steps: 0,
            rungs: 0,
            speed: -2.0,
            packet_center: f64::NAN,
            packet_width: 0.0,
        };
        match chain_vs_checkerboard(&cfg) {
            Err(Error::Config(problems)) => assert_eq!(problems.len(), 7, "{problems:?}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
