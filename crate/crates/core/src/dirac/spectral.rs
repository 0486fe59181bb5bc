use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::numerics::{Boundary, Grid1D};

/// Two-component spinor for the 1D two-speed wave equation
///
///   i hbar dpsi/dt = m c^2 sigma_x psi - i c hbar sigma_z dpsi/dx.
///
/// Sign convention, fixed here once: psi_plus (the sigma_z = +1 component) is
/// the +c mover, matching the right-moving density it continues from. Writing
/// the derivative term with the opposite sign merely relabels the components.
#[derive(Debug, Clone)]
pub struct WeylSpinor {
    grid: Grid1D,
    psi_plus: Vec<Complex64>,
    psi_minus: Vec<Complex64>,
    mass: f64,
    speed: f64,
    hbar: f64,
}

impl WeylSpinor {
    pub fn new(
        grid: Grid1D,
        psi_plus: Vec<Complex64>,
        psi_minus: Vec<Complex64>,
        mass: f64,
        speed: f64,
        hbar: f64,
    ) -> Result<Self> {
        if psi_plus.len() != grid.len() || psi_minus.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "components of length {} and {} on a {}-point grid",
                psi_plus.len(),
                psi_minus.len(),
                grid.len()
            )));
        }
        check_params(mass, speed, hbar)?;
        Ok(WeylSpinor {
            grid,
            psi_plus,
            psi_minus,
            mass,
            speed,
            hbar,
        })
    }

    /// Normalized Gaussian packet in the +c component only.
    pub fn packet(
        grid: Grid1D,
        center: f64,
        width: f64,
        wavenumber: f64,
        mass: f64,
        speed: f64,
        hbar: f64,
    ) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::Domain(format!(
                "packet width must be positive, got {width}"
            )));
        }
        let plus: Vec<Complex64> = grid
            .points()
            .map(|x| {
                let envelope = (-(x - center) * (x - center) / (4.0 * width * width)).exp();
                Complex64::from_polar(envelope, wavenumber * x)
            })
            .collect();
        let minus = vec![Complex64::ZERO; grid.len()];
        let mut spinor = WeylSpinor::new(grid, plus, minus, mass, speed, hbar)?;
        spinor.normalize()?;
        Ok(spinor)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn psi_plus(&self) -> &[Complex64] {
        &self.psi_plus
    }

    pub fn psi_minus(&self) -> &[Complex64] {
        &self.psi_minus
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn norm(&self) -> f64 {
        let sum: f64 = self
            .psi_plus
            .iter()
            .chain(&self.psi_minus)
            .map(|v| v.norm_sqr())
            .sum();
        (sum * self.grid.dx()).sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::DegenerateState(format!(
                "cannot normalize norm {norm}"
            )));
        }
        let inv = 1.0 / norm;
        for v in self.psi_plus.iter_mut().chain(self.psi_minus.iter_mut()) {
            *v *= inv;
        }
        Ok(())
    }
}

fn check_params(mass: f64, speed: f64, hbar: f64) -> Result<()> {
    if !(mass.is_finite() && mass >= 0.0)
        || !(speed.is_finite() && speed > 0.0)
        || !(hbar.is_finite() && hbar > 0.0)
    {
        return Err(Error::Domain(format!(
            "need mass >= 0, speed > 0, hbar > 0, got m={mass}, c={speed}, hbar={hbar}"
        )));
    }
    Ok(())
}

/// The relativistic mode frequency omega(k) = sqrt((mc^2)^2 + (c hbar k)^2)/hbar.
pub fn dispersion_frequency(mass: f64, speed: f64, hbar: f64, k: f64) -> f64 {
    let rest = mass * speed * speed;
    let kinetic = speed * hbar * k;
    (rest * rest + kinetic * kinetic).sqrt() / hbar
}

/// Exact-in-time spectral stepper: for each Fourier mode it applies the 2x2
/// exponential exp(-i H(k) dt / hbar) with H(k) = m c^2 sigma_x + c hbar k sigma_z,
/// so the only error is rounding. Each step costs two FFT round trips.
pub struct WeylPropagator {
    grid: Grid1D,
    mass: f64,
    speed: f64,
    hbar: f64,
    dt: f64,
    u00: Vec<Complex64>,
    u01: Vec<Complex64>,
    u11: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    fast_grid: bool,
}

impl WeylPropagator {
    pub fn new(grid: &Grid1D, mass: f64, speed: f64, hbar: f64, dt: f64) -> Result<Self> {
        if grid.boundary() != Boundary::Periodic {
            return Err(Error::Domain(
                "the spectral stepper needs a periodic grid".into(),
            ));
        }
        check_params(mass, speed, hbar)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!("stepper needs dt > 0, got {dt}")));
        }
        let n = grid.len();
        let rest = mass * speed * speed;
        let mut u00 = Vec::with_capacity(n);
        let mut u01 = Vec::with_capacity(n);
        let mut u11 = Vec::with_capacity(n);
        for k in grid.wavenumbers() {
            let kinetic = speed * hbar * k;
            let energy = (rest * rest + kinetic * kinetic).sqrt();
            if energy == 0.0 {
                u00.push(Complex64::ONE);
                u01.push(Complex64::ZERO);
                u11.push(Complex64::ONE);
                continue;
            }
            let theta = energy * dt / hbar;
            let (sin, cos) = theta.sin_cos();
            let hx = rest / energy;
            let hz = kinetic / energy;
            u00.push(Complex64::new(cos, -sin * hz));
            u01.push(Complex64::new(0.0, -sin * hx));
            u11.push(Complex64::new(cos, sin * hz));
        }
        let mut planner = FftPlanner::new();
        Ok(WeylPropagator {
            grid: grid.clone(),
            mass,
            speed,
            hbar,
            dt,
            u00,
            u01,
            u11,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            fast_grid: n.is_power_of_two(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// False for grid sizes that fall back to the slower generic FFT.
    pub fn fast_grid(&self) -> bool {
        self.fast_grid
    }

    pub fn step(&self, spinor: &mut WeylSpinor) -> Result<()> {
        if spinor.grid != self.grid {
            return Err(Error::Dimension(
                "spinor grid differs from the stepper's".into(),
            ));
        }
        if spinor.mass != self.mass || spinor.speed != self.speed || spinor.hbar != self.hbar {
            return Err(Error::Domain(
                "spinor physical constants differ from the stepper's".into(),
            ));
        }
        let n = self.grid.len();
        let mut plus = spinor.psi_plus.clone();
        let mut minus = spinor.psi_minus.clone();
        self.forward.process(&mut plus);
        self.forward.process(&mut minus);
        for i in 0..n {
            let a = plus[i];
            let b = minus[i];
            // u10 = u01 by symmetry of H(k).
            plus[i] = self.u00[i] * a + self.u01[i] * b;
            minus[i] = self.u01[i] * a + self.u11[i] * b;
        }
        self.inverse.process(&mut plus);
        self.inverse.process(&mut minus);
        let scale = 1.0 / n as f64;
        for (dst, src) in spinor.psi_plus.iter_mut().zip(&plus) {
            *dst = src * scale;
        }
        for (dst, src) in spinor.psi_minus.iter_mut().zip(&minus) {
            *dst = src * scale;
        }
        Ok(())
    }
}
