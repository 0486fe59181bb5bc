use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{log_log_slope, Boundary, Grid1D};

use super::checkerboard::CheckerboardLattice;
use super::rs_photon::{RsDiracPropagator, RsDiracState};
use super::spectral::{WeylPropagator, WeylSpinor};

/// Errors against a reference at a ladder of step sizes plus the fitted
/// log-log order. `fitted_order` is None when a fit would be meaningless:
/// fewer than two rungs, or some error already at rounding level.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub dt_ladder: Vec<f64>,
    pub l2_errors: Vec<f64>,
    pub fitted_order: Option<f64>,
}

impl ConvergenceReport {
    pub fn from_errors(dt_ladder: Vec<f64>, l2_errors: Vec<f64>) -> Result<Self> {
        if dt_ladder.len() != l2_errors.len() {
            return Err(Error::Dimension(format!(
                "{} step sizes against {} errors",
                dt_ladder.len(),
                l2_errors.len()
            )));
        }
        let fitted_order = if dt_ladder.len() < 2 || l2_errors.iter().any(|e| *e <= 1e-12) {
            None
        } else {
            Some(log_log_slope(&dt_ladder, &l2_errors)?)
        };
        Ok(ConvergenceReport {
            dt_ladder,
            l2_errors,
            fitted_order,
        })
    }
}

/// Refinement study comparing the light-cone lattice against the exact
/// spectral solution of the equation it discretizes.
#[derive(Debug, Clone)]
pub struct CheckerboardStudyConfig {
    pub x_min: f64,
    pub x_max: f64,
    /// Sites on the coarsest rung; doubled per rung.
    pub base_sites: usize,
    /// Lattice steps on the coarsest rung; doubled per rung so the physical
    /// time base_steps * dx / speed stays fixed.
    pub base_steps: usize,
    pub rungs: usize,
    pub mass: f64,
    pub speed: f64,
    pub hbar: f64,
    pub packet_center: f64,
    pub packet_width: f64,
    pub packet_wavenumber: f64,
    pub exact_mixing: bool,
}

impl CheckerboardStudyConfig {
    fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            problems.push(format!("box [{}, {}] is empty", self.x_min, self.x_max));
        }
        if self.base_sites < 2 {
            problems.push(format!("base_sites = {} < 2", self.base_sites));
        }
        if self.base_steps == 0 {
            problems.push("base_steps = 0".into());
        }
        if self.rungs == 0 {
            problems.push("rungs = 0".into());
        }
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            problems.push(format!("mass = {}", self.mass));
        }
        if !(self.speed.is_finite() && self.speed > 0.0) {
            problems.push(format!("speed = {}", self.speed));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            problems.push(format!("hbar = {}", self.hbar));
        }
        if !(self.packet_width.is_finite() && self.packet_width > 0.0) {
            problems.push(format!("packet_width = {}", self.packet_width));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

/// Evolve the same packet with the lattice and with the exact mode-wise
/// exponential of the lattice's continuum equation, on successively doubled
/// grids at fixed physical time, and fit the decay order of the L2 gap.
///
/// The lattice equation differs from the spectral stepper's by the component
/// relabeling psi -> sigma_z psi and a rest-energy phase: its mass term is
/// m c^2 (I - sigma_x) rather than m c^2 sigma_x. The reference therefore
/// flips the sign of the minus component going in and out and multiplies by
/// exp(-i m c^2 t / hbar).
pub fn checkerboard_vs_dirac(cfg: &CheckerboardStudyConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let mut dt_ladder = Vec::with_capacity(cfg.rungs);
    let mut l2_errors = Vec::with_capacity(cfg.rungs);
    for rung in 0..cfg.rungs {
        let sites = cfg.base_sites << rung;
        let steps = cfg.base_steps << rung;
        let grid = Grid1D::new(cfg.x_min, cfg.x_max, sites, Boundary::Periodic)?;
        let dt = grid.dx() / cfg.speed;
        let t_final = steps as f64 * dt;

        let packet = WeylSpinor::packet(
            grid.clone(),
            cfg.packet_center,
            cfg.packet_width,
            cfg.packet_wavenumber,
            cfg.mass,
            cfg.speed,
            cfg.hbar,
        )?;
        let lattice =
            CheckerboardLattice::continued(grid.clone(), steps, cfg.speed, cfg.mass, cfg.hbar)?
                .with_exact_mixing(cfg.exact_mixing);
        let (lat_plus, lat_minus) = lattice.propagate(packet.psi_plus(), packet.psi_minus())?;

        let (ref_plus, ref_minus) = lattice_continuum_reference(&packet, t_final)?;

        let mut err = 0.0;
        for i in 0..grid.len() {
            err += (lat_plus[i] - ref_plus[i]).norm_sqr();
            err += (lat_minus[i] - ref_minus[i]).norm_sqr();
        }
        dt_ladder.push(dt);
        l2_errors.push((err * grid.dx()).sqrt());
    }
    ConvergenceReport::from_errors(dt_ladder, l2_errors)
}

/// Exact solution of the lattice's continuum equation at time t_final,
/// computed from the spectral stepper plus the relabeling described above.
fn lattice_continuum_reference(
    initial: &WeylSpinor,
    t_final: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let grid = initial.grid().clone();
    let flipped: Vec<Complex64> = initial.psi_minus().iter().map(|v| -v).collect();
    let mut spinor = WeylSpinor::new(
        grid.clone(),
        initial.psi_plus().to_vec(),
        flipped,
        initial.mass(),
        initial.speed(),
        initial.hbar(),
    )?;
    // One exact step covering the whole interval.
    let prop = WeylPropagator::new(
        &grid,
        initial.mass(),
        initial.speed(),
        initial.hbar(),
        t_final,
    )?;
    prop.step(&mut spinor)?;
    let rest_phase = Complex64::from_polar(
        1.0,
        -initial.mass() * initial.speed() * initial.speed() * t_final / initial.hbar(),
    );
    let plus = spinor.psi_plus().iter().map(|v| rest_phase * v).collect();
    let minus = spinor.psi_minus().iter().map(|v| -rest_phase * v).collect();
    Ok((plus, minus))
}

/// Distances from a mass ladder's final states to each other and to the
/// massless run, plus the fitted power of the mass in the gap.
#[derive(Debug, Clone, Serialize)]
pub struct MasslessLimitReport {
    pub masses: Vec<f64>,
    /// distance(state(m_i), state(m_{i+1})); length masses.len() - 1.
    pub successive_differences: Vec<f64>,
    /// distance(state(m_i), state(0)); length masses.len().
    pub differences_to_massless: Vec<f64>,
    /// Slope of log(difference to massless) against log(mass).
    pub fitted_mass_order: Option<f64>,
}

/// Evolve copies of `template` with each mass in `masses` (strictly
/// decreasing, positive) and once with mass zero, all for n_steps of dt, and
/// measure how the final states approach the massless one.
pub fn massless_limit_study(
    template: &RsDiracState,
    masses: &[f64],
    dt: f64,
    n_steps: usize,
) -> Result<MasslessLimitReport> {
    let mut problems = Vec::new();
    if masses.is_empty() {
        problems.push("mass ladder is empty".into());
    }
    if masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        problems.push(format!(
            "mass ladder must be positive and finite, got {masses:?}"
        ));
    }
    if masses.windows(2).any(|w| w[1] >= w[0]) {
        problems.push(format!(
            "mass ladder must be strictly decreasing, got {masses:?}"
        ));
    }
    if !(dt.is_finite() && dt > 0.0) {
        problems.push(format!("dt = {dt}"));
    }
    if n_steps == 0 {
        problems.push("n_steps = 0".into());
    }
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }

    let evolve = |mass: f64| -> Result<RsDiracState> {
        let mut state = template.with_mass(mass)?;
        let prop =
            RsDiracPropagator::new(state.grid(), state.mass(), state.speed(), state.hbar(), dt)?;
        for _ in 0..n_steps {
            prop.step(&mut state)?;
        }
        Ok(state)
    };
    let finals: Vec<RsDiracState> = masses.iter().map(|m| evolve(*m)).collect::<Result<_>>()?;
    let massless = evolve(0.0)?;

    let successive_differences = finals
        .windows(2)
        .map(|w| w[0].distance(&w[1]))
        .collect::<Result<Vec<_>>>()?;
    let differences_to_massless = finals
        .iter()
        .map(|s| s.distance(&massless))
        .collect::<Result<Vec<_>>>()?;
    let fitted_mass_order =
        if masses.len() < 2 || differences_to_massless.iter().any(|d| *d <= 1e-12) {
            None
        } else {
            Some(log_log_slope(masses, &differences_to_massless)?)
        };
    Ok(MasslessLimitReport {
        masses: masses.to_vec(),
        successive_differences,
        differences_to_massless,
        fitted_mass_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::rs_photon::helicity_vector;

    fn study_config(exact: bool, mass: f64) -> CheckerboardStudyConfig {
        CheckerboardStudyConfig {
            x_min: -8.0,
            x_max: 8.0,
            base_sites: 64,
            base_steps: 4,
            rungs: 4,
            mass,
            speed: 1.0,
            hbar: 1.0,
            packet_center: 0.0,
            packet_width: 1.0,
            packet_wavenumber: 1.0,
            exact_mixing: exact,
        }
    }

    #[test]
    fn first_order_mixing_converges_at_order_one() {
        let report = checkerboard_vs_dirac(&study_config(false, 1.0)).unwrap();
        assert_eq!(report.dt_ladder.len(), 4);
        assert!(
            report.l2_errors.windows(2).all(|w| w[1] < w[0]),
            "errors not decreasing: {:?}",
            report.l2_errors
        );
        let order = report.fitted_order.unwrap();
        assert!(
            (order - 1.0).abs() < 0.2,
            "order {order}, errors {:?}",
            report.l2_errors
        );
    }

    #[test]
    fn symmetrized_exact_mixing_converges_at_order_two() {
        let report = checkerboard_vs_dirac(&study_config(true, 1.0)).unwrap();
        let order = report.fitted_order.unwrap();
        assert!(
            (order - 2.0).abs() < 0.2,
            "order {order}, errors {:?}",
            report.l2_errors
        );
    }

    #[test]
    fn massless_lattice_is_exact() {
        let report = checkerboard_vs_dirac(&study_config(false, 0.0)).unwrap();
        assert!(
            report.l2_errors.iter().all(|e| *e < 1e-10),
            "errors {:?}",
            report.l2_errors
        );
        assert!(report.fitted_order.is_none());
    }

    #[test]
    fn study_rejects_bad_boxes_and_reports_every_problem() {
        let mut cfg = study_config(false, 1.0);
        cfg.x_min = 5.0;
        cfg.x_max = 5.0;
        cfg.rungs = 0;
        match checkerboard_vs_dirac(&cfg) {
            Err(Error::Config(problems)) => assert_eq!(problems.len(), 2, "{problems:?}"),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    fn rs_template(grid: &Grid1D) -> RsDiracState {
        let e = helicity_vector(1);
        let envelope: Vec<Complex64> = grid
            .points()
            .map(|x| Complex64::new((-x * x / 2.0).exp(), 0.0))
            .collect();
        let f_plus = [
            envelope.iter().map(|g| g * e[0]).collect(),
            envelope.iter().map(|g| g * e[1]).collect(),
            envelope.iter().map(|g| g * e[2]).collect(),
        ];
        let zeros = vec![Complex64::ZERO; grid.len()];
        let f_minus = [zeros.clone(), zeros.clone(), zeros];
        let mut st = RsDiracState::new(grid.clone(), f_plus, f_minus, 1.0, 1.0, 1.0).unwrap();
        st.normalize().unwrap();
        st
    }

    #[test]
    fn halving_the_mass_halves_the_distance_to_massless() {
        let grid = Grid1D::new(-8.0, 8.0, 64, Boundary::Periodic).unwrap();
        let template = rs_template(&grid);
        let masses = [0.2, 0.1, 0.05, 0.025];
        let report = massless_limit_study(&template, &masses, 0.05, 40).unwrap();
        for w in report.differences_to_massless.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
        }
        for w in report.successive_differences.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2.0).abs() < 0.1, "successive ratio {ratio}");
        }
        let order = report.fitted_mass_order.unwrap();
        assert!((order - 1.0).abs() < 0.05, "order {order}");
        // Linear bound: gap <= C * m with one C across the ladder.
        let c = report.differences_to_massless[0] / report.masses[0];
        for (m, d) in report.masses.iter().zip(&report.differences_to_massless) {
            assert!(
                *d <= 1.05 * c * m,
                "gap {d} above the linear bound at m={m}"
            );
        }
    }

    #[test]
    fn mass_ladder_misuse_is_collected_into_one_config_error() {
        let grid = Grid1D::new(-8.0, 8.0, 32, Boundary::Periodic).unwrap();
        let template = rs_template(&grid);
        match massless_limit_study(&template, &[0.1, 0.2], 0.0, 0) {
            Err(Error::Config(problems)) => {
                assert!(problems.len() >= 3, "{problems:?}");
            }
            other => panic!("expected a config error, got {other:?}"),
        }
        assert!(massless_limit_study(&template, &[], 0.1, 1).is_err());
        assert!(massless_limit_study(&template, &[0.1, -0.2], 0.1, 1).is_err());
    }
}
