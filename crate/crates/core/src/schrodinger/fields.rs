use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{central_gradient, second_derivative, Boundary, ComplexField, Grid1D};

/// Drift-field view of a wavefunction: density, osmotic and current
/// velocities, log-amplitude R and action S with psi = exp(R + i S / hbar).
///
/// Points where rho falls below `rho_floor` (1e-12 of the density peak) carry
/// NaN in `u`, `v`, and `r`; consumers must mask them. `s` accumulates local
/// phase increments arg(psi[i+1] conj(psi[i])) and therefore stays finite
/// everywhere, but is only trustworthy between masked gaps.
#[derive(Debug, Clone)]
pub struct NelsonFields {
    pub grid: Grid1D,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub rho_floor: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl NelsonFields {
    pub fn is_masked(&self, i: usize) -> bool {
        self.rho[i] < self.rho_floor
    }

    /// Forward drift b_f = v + u (NaN where masked).
    pub fn forward_drift(&self) -> Vec<f64> {
        self.v.iter().zip(&self.u).map(|(v, u)| v + u).collect()
    }

    /// Backward drift b_b = v - u (NaN where masked).
    pub fn backward_drift(&self) -> Vec<f64> {
        self.v.iter().zip(&self.u).map(|(v, u)| v - u).collect()
    }
}

fn check_params(mass: f64, hbar: f64) -> Result<()> {
    if !(mass.is_finite() && mass > 0.0) || !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::Domain(format!(
            "need mass > 0 and hbar > 0, got m={mass}, hbar={hbar}"
        )));
    }
    Ok(())
}

/// Extract (rho, u, v, R, S) from a wavefunction.
///
/// u comes from the density gradient, u = (hbar/2m) rho'/rho. v comes from
/// branch-free local phase increments: arg(psi[i+1] conj(psi[i-1])) measures
/// the unwrapped phase difference across two cells whenever neighboring
/// phases differ by less than pi, which any resolved state satisfies.
pub fn nelson_map(psi: &ComplexField, mass: f64, hbar: f64) -> Result<NelsonFields> {
    check_params(mass, hbar)?;
    let grid = psi.grid().clone();
    let n = grid.len();
    let dx = grid.dx();
    let vals = psi.values();

    let rho = psi.density();
    let max_rho = rho.iter().cloned().fold(0.0f64, f64::max);
    if !max_rho.is_finite() || max_rho <= 0.0 {
        return Err(Error::DegenerateState(format!(
            "density peak is {max_rho}; no drift fields exist"
        )));
    }
    let rho_floor = 1e-12 * max_rho;

    // Single-cell phase increments delta[i] = arg(psi[i+1] conj(psi[i])).
    // For periodic grids delta[n-1] wraps around.
    let n_inc = match grid.boundary() {
        Boundary::Periodic => n,
        Boundary::Clamped => n - 1,
    };
    let delta: Vec<f64> = (0..n_inc)
        .map(|i| (vals[(i + 1) % n] * vals[i].conj()).arg())
        .collect();

    let grad_rho = central_gradient(&rho, dx, grid.boundary())?;
    let scale_v = hbar / (mass * 2.0 * dx);

    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for i in 0..n {
        if rho[i] < rho_floor {
            u.push(f64::NAN);
            v.push(f64::NAN);
            r.push(f64::NAN);
            continue;
        }
        u.push(hbar / (2.0 * mass) * grad_rho[i] / rho[i]);
        let two_cell = match grid.boundary() {
            Boundary::Periodic => delta[(i + n - 1) % n] + delta[i % n],
            Boundary::Clamped => {
                if i == 0 {
                    3.0 * delta[0] - delta[1]
                } else if i == n - 1 {
                    3.0 * delta[n - 2] - delta[n - 3]
                } else {
                    delta[i - 1] + delta[i]
                }
            }
        };
        v.push(scale_v * two_cell);
        r.push(0.5 * rho[i].ln());
    }

    // S accumulates the same increments; exp(iS/hbar) reproduces the phase
    // exactly even where the accumulated winding differs by multiples of 2 pi.
    let mut s = Vec::with_capacity(n);
    let mut acc = 0.0;
    s.push(0.0);
    for &d in delta.iter().take(n - 1) {
        acc += hbar * d;
        s.push(acc);
    }

    Ok(NelsonFields {
        grid,
        rho,
        u,
        v,
        r,
        s,
        rho_floor,
        mass,
        hbar,
    })
}

/// u = (hbar/2m) d/dx ln(rho). Requires strictly positive density samples;
/// exact to rounding whenever ln(rho) is locally quadratic (Gaussians).
pub fn osmotic_velocity(rho: &[f64], grid: &Grid1D, mass: f64, hbar: f64) -> Result<Vec<f64>> {
    check_params(mass, hbar)?;
    if rho.len() != grid.len() {
        return Err(Error::Dimension(format!(
            "density has {} samples on a {}-point grid",
            rho.len(),
            grid.len()
        )));
    }
    if let Some(i) = rho.iter().position(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::Domain(format!(
            "osmotic velocity needs rho > 0 everywhere; rho[{i}] = {}",
            rho[i]
        )));
    }
    let log_rho: Vec<f64> = rho.iter().map(|x| x.ln()).collect();
    let grad = central_gradient(&log_rho, grid.dx(), grid.boundary())?;
    Ok(grad.into_iter().map(|g| hbar / (2.0 * mass) * g).collect())
}

/// V_Q = -(hbar^2/2m) [ (R')^2 + R'' ] from the log-amplitude R.
/// NaN entries in R (masked points) propagate to neighboring outputs.
pub fn quantum_potential(r: &[f64], grid: &Grid1D, mass: f64, hbar: f64) -> Result<Vec<f64>> {
    check_params(mass, hbar)?;
    if r.len() != grid.len() {
        return Err(Error::Dimension(format!(
            "R has {} samples on a {}-point grid",
            r.len(),
            grid.len()
        )));
    }
    let d1 = central_gradient(r, grid.dx(), grid.boundary())?;
    let d2 = second_derivative(r, grid.dx(), grid.boundary())?;
    let c = -hbar * hbar / (2.0 * mass);
    Ok(d1.iter().zip(&d2).map(|(a, b)| c * (a * a + b)).collect())
}

/// The same quantum potential written on the density:
/// V_Q = -(hbar^2/4m) [ rho''/rho - (rho')^2 / (2 rho^2) ].
/// Agrees with [`quantum_potential`] on smooth positive inputs; the two forms
/// are kept as separate code paths deliberately.
pub fn quantum_potential_from_density(
    rho: &[f64],
    grid: &Grid1D,
    mass: f64,
    hbar: f64,
) -> Result<Vec<f64>> {
    check_params(mass, hbar)?;
    if rho.len() != grid.len() {
        return Err(Error::Dimension(format!(
            "density has {} samples on a {}-point grid",
            rho.len(),
            grid.len()
        )));
    }
    if let Some(i) = rho.iter().position(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::Domain(format!(
            "density form needs rho > 0 everywhere; rho[{i}] = {}",
            rho[i]
        )));
    }
    let d1 = central_gradient(rho, grid.dx(), grid.boundary())?;
    let d2 = second_derivative(rho, grid.dx(), grid.boundary())?;
    let c = -hbar * hbar / (4.0 * mass);
    Ok((0..rho.len())
        .map(|i| c * (d2[i] / rho[i] - d1[i] * d1[i] / (2.0 * rho[i] * rho[i])))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    /// Pointwise residual of d(rho)/dt + d(v rho)/dx; NaN where masked.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub masked_points: usize,
}

/// Discrete continuity check between two field snapshots dt apart.
///
/// Uses the centered pairing (rho2 - rho1)/dt + d/dx[(v1 rho1 + v2 rho2)/2],
/// which is O(dt^2) + O(dx^2) for smooth evolutions. The flux v*rho is taken
/// as zero on masked points: below the floor it is bounded by rho_floor*|v|,
/// far under any tolerance this check can resolve.
pub fn continuity_residual(
    before: &NelsonFields,
    after: &NelsonFields,
    dt: f64,
) -> Result<ContinuityReport> {
    if before.grid != after.grid {
        return Err(Error::Dimension("snapshots live on different grids".into()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!(
            "continuity check needs dt > 0, got {dt}"
        )));
    }
    let n = before.grid.len();
    let flux = |f: &NelsonFields| -> Vec<f64> {
        (0..n)
            .map(|i| {
                if f.is_masked(i) {
                    0.0
                } else {
                    f.v[i] * f.rho[i]
                }
            })
            .collect()
    };
    let f1 = flux(before);
    let f2 = flux(after);
    let favg: Vec<f64> = f1.iter().zip(&f2).map(|(a, b)| 0.5 * (a + b)).collect();
    let dflux = central_gradient(&favg, before.grid.dx(), before.grid.boundary())?;

    let mut residuals = Vec::with_capacity(n);
    let mut max_residual = 0.0f64;
    let mut masked_points = 0;
    for i in 0..n {
        if before.is_masked(i) || after.is_masked(i) {
            residuals.push(f64::NAN);
            masked_points += 1;
            continue;
        }
        let r = (after.rho[i] - before.rho[i]) / dt + dflux[i];
        residuals.push(r);
        max_residual = max_residual.max(r.abs());
    }
    Ok(ContinuityReport {
        residuals,
        max_residual,
        masked_points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CollapseReport {
    pub threshold: f64,
    /// Inclusive index ranges where |u| < threshold.
    pub regions: Vec<(usize, usize)>,
    /// Probability mass inside the flagged regions.
    pub mass_fraction: f64,
}

/// Flag regions where the osmotic velocity has (numerically) vanished, i.e.
/// where forward and backward drifts agree and the walk is classical.
pub fn collapse_detector(fields: &NelsonFields, threshold: f64) -> Result<CollapseReport> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::Domain(format!(
            "collapse threshold must be > 0, got {threshold}"
        )));
    }
    let n = fields.grid.len();
    let mut regions: Vec<(usize, usize)> = Vec::new();
    let mut open: Option<usize> = None;
    let mut flagged_mass = 0.0;
    let total_mass: f64 = fields.rho.iter().sum();
    for i in 0..n {
        let flagged = fields.u[i].is_finite() && fields.u[i].abs() < threshold;
        if flagged {
            flagged_mass += fields.rho[i];
            if open.is_none() {
                open = Some(i);
            }
        } else if let Some(start) = open.take() {
            regions.push((start, i - 1));
        }
    }
    if let Some(start) = open {
        regions.push((start, n - 1));
    }
    if total_mass <= 0.0 || !total_mass.is_finite() {
        return Err(Error::DegenerateState(
            "no probability mass on the grid".into(),
        ));
    }
    Ok(CollapseReport {
        threshold,
        regions,
        mass_fraction: flagged_mass / total_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::{gaussian_packet, harmonic_ground_state};
    use num_complex::Complex64;

    #[test]
    fn plane_wave_has_flat_density_and_exact_current() {
        let n = 128;
        let grid = Grid1D::new(0.0, 2.0 * std::f64::consts::PI, n, Boundary::Periodic).unwrap();
        let k = 5.0;
        let psi = ComplexField::from_fn(grid.clone(), |x| Complex64::from_polar(1.0, k * x));
        let f = nelson_map(&psi, 1.0, 1.0).unwrap();
        for i in 0..n {
            assert!(f.u[i].abs() < 1e-12, "u[{i}] = {}", f.u[i]);
            assert!((f.v[i] - k).abs() < 1e-12, "v[{i}] = {}", f.v[i]);
        }
        // u == 0 everywhere: the entire grid is one collapsed region.
        let report = collapse_detector(&f, 1e-6).unwrap();
        assert_eq!(report.regions, vec![(0, n - 1)]);
        assert!((report.mass_fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_osmotic_velocity_is_minus_omega_x() {
        let grid = Grid1D::new(-8.0, 8.0, 2048, Boundary::Clamped).unwrap();
        let omega = 1.3;
        let psi = harmonic_ground_state(&grid, 1.0, omega, 1.0);
        // ln(rho) is exactly quadratic, so the stencil is exact here.
        let u = osmotic_velocity(&psi.density(), &grid, 1.0, 1.0).unwrap();
        for (x, ui) in grid.points().zip(&u) {
            assert!((ui + omega * x).abs() < 1e-9, "x={x} u={ui}");
        }
        // The map's rho-ratio route carries a relative O((x dx)^2) error instead.
        let f = nelson_map(&psi, 1.0, 1.0).unwrap();
        for (i, x) in grid.points().enumerate() {
            if f.is_masked(i) || x.abs() > 3.5 {
                continue;
            }
            let tol = 2e-3 * (1.0 + (omega * x).abs());
            assert!((f.u[i] + omega * x).abs() < tol, "x={x} u={}", f.u[i]);
            assert_eq!(f.v[i], 0.0, "real state must have exactly zero current");
        }
    }

    #[test]
    fn drift_combinations_recover_u_and_v() {
        let grid = Grid1D::new(-6.0, 6.0, 256, Boundary::Clamped).unwrap();
        let psi = gaussian_packet(&grid, 0.3, 0.9, 1.1);
        let f = nelson_map(&psi, 1.0, 1.0).unwrap();
        let bf = f.forward_drift();
        let bb = f.backward_drift();
        for i in 0..grid.len() {
            if f.is_masked(i) {
                continue;
            }
            assert!((0.5 * (bf[i] + bb[i]) - f.v[i]).abs() < 1e-14);
            assert!((0.5 * (bf[i] - bb[i]) - f.u[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn round_trip_reconstruction_is_near_exact() {
        // psi -> (rho, S) -> sqrt(rho) exp(iS/hbar) must reproduce psi up to
        // a global phase wherever the density is above the floor.
        let grid = Grid1D::new(-10.0, 10.0, 512, Boundary::Clamped).unwrap();
        let hbar = 1.0;
        let psi = ComplexField::from_fn(grid.clone(), |x| {
            let r = -0.25 * x * x + 0.1 * (1.3 * x).cos();
            let s = 0.7 * x + 0.4 * (0.9 * x).sin();
            Complex64::from_polar(r.exp(), s / hbar)
        });
        let f = nelson_map(&psi, 1.0, hbar).unwrap();
        let peak = f
            .rho
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        let rec_peak = Complex64::from_polar(f.rho[peak].sqrt(), f.s[peak] / hbar);
        let phase = (psi.values()[peak] / rec_peak).arg();
        let mut worst = 0.0f64;
        for i in 0..grid.len() {
            if f.is_masked(i) {
                continue;
            }
            let rec = Complex64::from_polar(f.rho[i].sqrt(), f.s[i] / hbar + phase);
            worst = worst.max((rec - psi.values()[i]).norm());
        }
        assert!(worst < 1e-12, "round-trip error {worst}");
    }

    #[test]
    fn quantum_potential_forms_agree_on_smooth_input() {
        let grid = Grid1D::new(-6.0, 6.0, 8192, Boundary::Clamped).unwrap();
        let r: Vec<f64> = grid.points().map(|x| -x * x / 16.0).collect();
        let rho: Vec<f64> = r.iter().map(|ri| (2.0 * ri).exp()).collect();
        let vq_r = quantum_potential(&r, &grid, 1.0, 1.0).unwrap();
        let vq_rho = quantum_potential_from_density(&rho, &grid, 1.0, 1.0).unwrap();
        let mut worst = 0.0f64;
        for i in 0..grid.len() {
            worst = worst.max((vq_r[i] - vq_rho[i]).abs());
        }
        assert!(worst < 1e-6, "two-form disagreement {worst}");
    }

    #[test]
    fn ground_state_quantum_potential_balances_the_trap() {
        // R quadratic: stencils are exact, so V_Q = hbar omega/2 - m omega^2 x^2/2
        // and V + V_Q is spatially constant (the energy).
        let grid = Grid1D::new(-8.0, 8.0, 1024, Boundary::Clamped).unwrap();
        let (m, omega, hbar) = (1.0, 1.0, 1.0);
        let r: Vec<f64> = grid
            .points()
            .map(|x| -m * omega * x * x / (2.0 * hbar))
            .collect();
        let vq = quantum_potential(&r, &grid, m, hbar).unwrap();
        for (x, vqi) in grid.points().zip(&vq) {
            let expected = 0.5 * hbar * omega - 0.5 * m * omega * omega * x * x;
            assert!((vqi - expected).abs() < 1e-9, "x={x}");
            let total = 0.5 * m * omega * omega * x * x + vqi;
            assert!((total - 0.5 * hbar * omega).abs() < 1e-9);
        }
    }

    #[test]
    fn continuity_residual_zero_for_stationary_state_and_large_when_corrupted() {
        let grid = Grid1D::new(-8.0, 8.0, 512, Boundary::Clamped).unwrap();
        let psi = harmonic_ground_state(&grid, 1.0, 1.0, 1.0);
        let f1 = nelson_map(&psi, 1.0, 1.0).unwrap();
        let f2 = f1.clone();
        let report = continuity_residual(&f1, &f2, 1e-2).unwrap();
        assert!(
            report.max_residual < 1e-8,
            "stationary residual {}",
            report.max_residual
        );

        // A moving packet with v scaled by 2 violates continuity visibly.
        let t = 0.4;
        let dt = 1e-3;
        let s1 = crate::schrodinger::free_gaussian_analytic(&grid, 1.0, t, 1.0, 1.0);
        let s2 = crate::schrodinger::free_gaussian_analytic(&grid, 1.0, t + dt, 1.0, 1.0);
        let g1 = nelson_map(&s1, 1.0, 1.0).unwrap();
        let g2 = nelson_map(&s2, 1.0, 1.0).unwrap();
        let clean = continuity_residual(&g1, &g2, dt).unwrap();
        let mut bad1 = g1.clone();
        let mut bad2 = g2.clone();
        for v in bad1.v.iter_mut().chain(bad2.v.iter_mut()) {
            *v *= 2.0;
        }
        let corrupted = continuity_residual(&bad1, &bad2, dt).unwrap();
        assert!(
            clean.max_residual < 1e-3,
            "clean residual {}",
            clean.max_residual
        );
        assert!(
            corrupted.max_residual > 20.0 * clean.max_residual.max(1e-6),
            "corrupted {} vs clean {}",
            corrupted.max_residual,
            clean.max_residual
        );
    }

    #[test]
    fn collapse_fraction_matches_quadrature() {
        let grid = Grid1D::new(-8.0, 8.0, 4096, Boundary::Clamped).unwrap();
        let omega = 1.0;
        let psi = harmonic_ground_state(&grid, 1.0, omega, 1.0);
        let f = nelson_map(&psi, 1.0, 1.0).unwrap();
        let max_u =
            f.u.iter()
                .filter(|x| x.is_finite())
                .map(|x| x.abs())
                .fold(0.0f64, f64::max);
        let threshold = 0.1 * max_u;
        let report = collapse_detector(&f, threshold).unwrap();
        // Oracle: quadrature of rho over |u_exact| = omega |x| < threshold.
        let dx = grid.dx();
        let flagged: f64 = grid
            .points()
            .zip(&f.rho)
            .filter(|(x, _)| (omega * x).abs() < threshold)
            .map(|(_, r)| r)
            .sum::<f64>()
            * dx;
        let total: f64 = f.rho.iter().sum::<f64>() * dx;
        let expected = flagged / total;
        assert_eq!(report.regions.len(), 1);
        assert!(
            (report.mass_fraction - expected).abs() < 1e-3,
            "fraction {} vs {}",
            report.mass_fraction,
            expected
        );
    }

    #[test]
    fn degenerate_state_is_rejected() {
        let grid = Grid1D::new(-1.0, 1.0, 32, Boundary::Clamped).unwrap();
        let zero = ComplexField::new(grid, vec![Complex64::default(); 32]).unwrap();
        assert!(matches!(
            nelson_map(&zero, 1.0, 1.0),
            Err(Error::DegenerateState(_))
        ));
    }
}
