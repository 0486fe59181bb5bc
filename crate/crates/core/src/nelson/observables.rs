use crate::error::{Error, Result};
use crate::numerics::{
    central_gradient, cumulative_trapezoid, integrate, second_derivative, Boundary, Grid1D,
};

use super::ensemble::{DriftSpec, Ensemble};

/// Which of the two transport equations a snapshot pair is tested against:
///
///   forward:  d rho/dt = -d/dx[(v+u) rho] + (sigma^2/2) d^2 rho/dx^2
///   backward: d rho/dt = -d/dx[(v-u) rho] - (sigma^2/2) d^2 rho/dx^2
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Gaussian kernel density estimate on the grid, normalized to integrate
/// to exactly 1. Kernels are truncated at six bandwidths; on periodic grids
/// they wrap around the box instead.
pub fn empirical_density(ens: &Ensemble, grid: &Grid1D, bandwidth: f64) -> Result<Vec<f64>> {
    if ens.n_particles() == 0 {
        return Err(Error::Domain(
            "cannot estimate a density from an empty ensemble".into(),
        ));
    }
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::Domain(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    let n = grid.len();
    let dx = grid.dx();
    let cut = 6.0 * bandwidth;
    let inv_h = 1.0 / bandwidth;
    let weight = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * bandwidth * ens.n_particles() as f64);
    let mut rho = vec![0.0; n];
    match grid.boundary() {
        Boundary::Clamped => {
            for &xp in ens.positions() {
                let i_lo = grid.cell_index(xp - cut);
                let i_hi = grid.cell_index(xp + cut);
                for (i, r) in rho.iter_mut().enumerate().take(i_hi + 1).skip(i_lo) {
                    let z = (grid.point(i) - xp) * inv_h;
                    *r += weight * (-0.5 * z * z).exp();
                }
            }
        }
        Boundary::Periodic => {
            let reach = (cut / dx).ceil() as i64;
            for &xp in ens.positions() {
                let center = ((xp - grid.x_min()) / dx).round() as i64;
                for j in (center - reach)..=(center + reach) {
                    let i = j.rem_euclid(n as i64) as usize;
                    let z = (grid.x_min() + j as f64 * dx - xp) * inv_h;
                    rho[i] += weight * (-0.5 * z * z).exp();
                }
            }
        }
    }
    let total = integrate(&rho, dx);
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::DegenerateState(format!(
            "density estimate integrates to {total}; all mass outside the grid?"
        )));
    }
    for r in &mut rho {
        *r /= total;
    }
    Ok(rho)
}

/// Max-norm residual of the selected transport equation on a pair of density
/// snapshots separated by dt. The time derivative is the forward difference;
/// space derivatives act on the midpoint average, so an exact solution leaves
/// a residual of O(dt^2 + dx^2).
pub fn fokker_planck_residual(
    rho_before: &[f64],
    rho_after: &[f64],
    drift: &DriftSpec,
    dt: f64,
    direction: Direction,
) -> Result<f64> {
    let grid = drift.grid();
    let n = grid.len();
    if rho_before.len() != n || rho_after.len() != n {
        return Err(Error::Dimension(format!(
            "snapshots of length {} and {} on a {}-point grid",
            rho_before.len(),
            rho_after.len(),
            n
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!(
            "snapshot spacing must be positive, got {dt}"
        )));
    }
    let sign = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let mid: Vec<f64> = rho_before
        .iter()
        .zip(rho_after)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let flux: Vec<f64> = drift
        .v()
        .iter()
        .zip(drift.u())
        .zip(&mid)
        .map(|((v, u), r)| (v + sign * u) * r)
        .collect();
    let dflux = central_gradient(&flux, grid.dx(), grid.boundary())?;
    let diffusion = second_derivative(&mid, grid.dx(), grid.boundary())?;
    let half_sigma2 = 0.5 * drift.sigma() * drift.sigma();
    let mut worst = 0.0f64;
    for i in 0..n {
        let residual =
            (rho_after[i] - rho_before[i]) / dt + dflux[i] - sign * half_sigma2 * diffusion[i];
        worst = worst.max(residual.abs());
    }
    Ok(worst)
}

/// Probability-weighted magnitude of the osmotic velocity.
///
/// The density is reconstructed from u itself: u = (sigma^2/2) d/dx ln rho, so
/// ln rho = (2/sigma^2) integral of u, normalized on the grid. Zero imbalance
/// means forward and backward drifts agree everywhere the system actually is,
/// i.e. the diffusion has collapsed onto classical transport.
#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceReport {
    /// integral |u(x)| rho(x) dx
    pub imbalance: f64,
    /// The density implied by the osmotic field, normalized to 1.
    pub density: Vec<f64>,
}

impl ImbalanceReport {
    pub fn is_balanced(&self, tol: f64) -> bool {
        self.imbalance <= tol
    }
}

pub fn quantum_classical_transition(drift: &DriftSpec) -> Result<ImbalanceReport> {
    let sigma = drift.sigma();
    if sigma <= 0.0 {
        return Err(Error::Domain(
            "imbalance needs a diffusion scale; sigma = 0 has no osmotic balance to measure".into(),
        ));
    }
    let grid = drift.grid();
    let dx = grid.dx();
    let scale = 2.0 / (sigma * sigma);
    let log_rho: Vec<f64> = cumulative_trapezoid(drift.u(), dx)
        .into_iter()
        .map(|s| scale * s)
        .collect();
    let peak = log_rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut density: Vec<f64> = log_rho.iter().map(|l| (l - peak).exp()).collect();
    let total = integrate(&density, dx);
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Numeric(format!(
            "reconstructed density integrates to {total}"
        )));
    }
    for d in &mut density {
        *d /= total;
    }
    let imbalance = drift
        .u()
        .iter()
        .zip(&density)
        .map(|(u, r)| u.abs() * r)
        .sum::<f64>()
        * dx;
    Ok(ImbalanceReport { imbalance, density })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use rand::Rng;

    #[test]
    fn single_atom_estimate_is_the_kernel_itself() {
        let grid = Grid1D::new(-2.0, 2.0, 400, Boundary::Clamped).unwrap();
        let h = 0.15;
        let x0 = 0.3;
        let ens = Ensemble::from_positions(vec![x0], RngStream::new(0, 0)).unwrap();
        let rho = empirical_density(&ens, &grid, h).unwrap();
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h);
        for (x, r) in grid.points().zip(&rho) {
            let z = (x - x0) / h;
            if z.abs() < 5.0 {
                let exact = norm * (-0.5 * z * z).exp();
                assert!((r - exact).abs() < 1e-4 * norm, "x={x}: {r} vs {exact}");
            }
        }
        assert!((integrate(&rho, grid.dx()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_sample_on_a_ring_estimates_a_flat_density() {
        let grid = Grid1D::new(0.0, 1.0, 200, Boundary::Periodic).unwrap();
        let mut rng = RngStream::new(21, 0).rng();
        let xs: Vec<f64> = (0..1_000_000).map(|_| rng.random::<f64>()).collect();
        let ens = Ensemble::from_positions(xs, RngStream::new(0, 0)).unwrap();
        let rho = empirical_density(&ens, &grid, 0.02).unwrap();
        for (x, r) in grid.points().zip(&rho) {
            assert!((r - 1.0).abs() < 0.02, "x={x}: {r}");
        }
    }

    #[test]
    fn estimate_normalization_is_exact_and_empty_input_fails() {
        let grid = Grid1D::new(-3.0, 3.0, 128, Boundary::Clamped).unwrap();
        let ens =
            Ensemble::from_positions(vec![-1.0, -0.2, 0.4, 2.9], RngStream::new(3, 0)).unwrap();
        let rho = empirical_density(&ens, &grid, 0.3).unwrap();
        assert!((integrate(&rho, grid.dx()) - 1.0).abs() < 1e-9);
        let empty = Ensemble::from_positions(vec![], RngStream::new(3, 0)).unwrap();
        assert!(matches!(
            empirical_density(&empty, &grid, 0.3),
            Err(Error::Domain(_))
        ));
    }

    // Heat kernel rho(x,t) = exp(-x^2/2t)/sqrt(2 pi t) solves the forward
    // equation with b = 0, sigma = 1; against the backward equation the
    // diffusion term enters with the wrong sign and the residual is ~2 max
    // |rho_t| = max|rho''| = rho(0)/t ~ 0.40 at t = 1.
    #[test]
    fn heat_kernel_satisfies_forward_but_not_backward_transport() {
        let grid = Grid1D::new(-12.0, 12.0, 1024, Boundary::Clamped).unwrap();
        let n = grid.len();
        let drift = DriftSpec::new(grid.clone(), vec![0.0; n], vec![0.0; n], 1.0).unwrap();
        let heat = |t: f64| -> Vec<f64> {
            grid.points()
                .map(|x| (-x * x / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t).sqrt())
                .collect()
        };
        let dt = 1e-3;
        let before = heat(1.0);
        let after = heat(1.0 + dt);
        let fwd = fokker_planck_residual(&before, &after, &drift, dt, Direction::Forward).unwrap();
        assert!(fwd < 1e-4, "forward residual {fwd}");
        let bwd = fokker_planck_residual(&before, &after, &drift, dt, Direction::Backward).unwrap();
        assert!(bwd > 0.1, "backward residual {bwd}");
    }

    #[test]
    fn stationary_ensemble_residual_shrinks_with_particle_count() {
        let grid = Grid1D::new(-6.0, 6.0, 128, Boundary::Clamped).unwrap();
        let exact: Vec<f64> = grid
            .points()
            .map(|x| (-x * x).exp() / std::f64::consts::PI.sqrt())
            .collect();
        let u: Vec<f64> = grid.points().map(|x| -x).collect();
        let drift = DriftSpec::new(grid.clone(), vec![0.0; grid.len()], u, 1.0).unwrap();
        let residual_at = |n: usize| -> f64 {
            let mut ens = Ensemble::from_density(n, &grid, &exact, RngStream::new(55, 1)).unwrap();
            let before = empirical_density(&ens, &grid, 0.05).unwrap();
            let dt = 5e-3;
            for _ in 0..20 {
                ens.forward_step(&drift, dt).unwrap();
            }
            let after = empirical_density(&ens, &grid, 0.05).unwrap();
            fokker_planck_residual(&before, &after, &drift, 20.0 * dt, Direction::Forward).unwrap()
        };
        let coarse = residual_at(2_500);
        let fine = residual_at(40_000);
        // 16x the particles should cut the noise by about 4; accept [2, 8].
        let ratio = coarse / fine;
        assert!(
            ratio > 2.0 && ratio < 8.0,
            "residuals {coarse} -> {fine}, ratio {ratio}"
        );
    }

    #[test]
    fn residual_rejects_mismatched_snapshots() {
        let grid = Grid1D::new(-1.0, 1.0, 16, Boundary::Clamped).unwrap();
        let n = grid.len();
        let drift = DriftSpec::new(grid, vec![0.0; n], vec![0.0; n], 1.0).unwrap();
        let err = fokker_planck_residual(&[0.0; 8], &vec![0.0; n], &drift, 0.1, Direction::Forward);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn plane_wave_drifts_are_perfectly_balanced() {
        let grid = Grid1D::new(0.0, 10.0, 64, Boundary::Periodic).unwrap();
        let n = grid.len();
        let drift = DriftSpec::new(grid, vec![1.7; n], vec![0.0; n], 1.0).unwrap();
        let report = quantum_classical_transition(&drift).unwrap();
        assert_eq!(report.imbalance, 0.0);
        assert!(report.is_balanced(0.0));
    }

    // For u = -omega x the implied density is the ground-state Gaussian and
    // the imbalance is omega E|x| = sqrt(hbar omega / pi m); quadrature value
    // 1/sqrt(pi) for omega = sigma = 1.
    #[test]
    fn harmonic_imbalance_matches_the_quadrature_value() {
        let grid = Grid1D::new(-8.0, 8.0, 2048, Boundary::Clamped).unwrap();
        let u: Vec<f64> = grid.points().map(|x| -x).collect();
        let v: Vec<f64> = grid.points().map(|x| 0.2 * x).collect();
        let drift = DriftSpec::new(grid.clone(), v, u.clone(), 1.0).unwrap();
        let report = quantum_classical_transition(&drift).unwrap();
        let expected = 1.0 / std::f64::consts::PI.sqrt();
        assert!(
            (report.imbalance - expected).abs() < 1e-4,
            "imbalance {} vs {expected}",
            report.imbalance
        );
        assert!((integrate(&report.density, grid.dx()) - 1.0).abs() < 1e-12);
        // v plays no role in the measure.
        let other = DriftSpec::new(grid.clone(), vec![0.0; grid.len()], u, 1.0).unwrap();
        assert_eq!(
            quantum_classical_transition(&other).unwrap().imbalance,
            report.imbalance
        );
    }

    #[test]
    fn imbalance_requires_a_noise_scale() {
        let grid = Grid1D::new(0.0, 1.0, 16, Boundary::Clamped).unwrap();
        let n = grid.len();
        let drift = DriftSpec::new(grid, vec![0.0; n], vec![0.0; n], 0.0).unwrap();
        assert!(quantum_classical_transition(&drift).is_err());
    }
}
