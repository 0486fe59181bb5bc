use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexField, Grid1D};

/// External potential for the wave-side oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    Free,
    /// V = (1/2) m omega^2 x^2
    Harmonic {
        omega: f64,
    },
    /// Arbitrary samples, one per grid point.
    Custom(Vec<f64>),
}

impl Potential {
    pub fn values(&self, grid: &Grid1D, mass: f64) -> Result<Vec<f64>> {
        match self {
            Potential::Free => Ok(vec![0.0; grid.len()]),
            Potential::Harmonic { omega } => {
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(Error::Domain(format!(
                        "harmonic potential needs omega > 0, got {omega}"
                    )));
                }
                Ok(grid
                    .points()
                    .map(|x| 0.5 * mass * omega * omega * x * x)
                    .collect())
            }
            Potential::Custom(v) => {
                if v.len() != grid.len() {
                    return Err(Error::Dimension(format!(
                        "custom potential has {} samples on a {}-point grid",
                        v.len(),
                        grid.len()
                    )));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Numeric(
                        "custom potential contains non-finite samples".into(),
                    ));
                }
                Ok(v.clone())
            }
        }
    }
}

/// psi_0(x) = (m omega / pi hbar)^(1/4) exp(-m omega x^2 / 2 hbar),
/// the stationary state with energy hbar omega / 2.
pub fn harmonic_ground_state(grid: &Grid1D, mass: f64, omega: f64, hbar: f64) -> ComplexField {
    let norm = (mass * omega / (std::f64::consts::PI * hbar)).powf(0.25);
    ComplexField::from_fn(grid.clone(), |x| {
        Complex64::new(norm * (-mass * omega * x * x / (2.0 * hbar)).exp(), 0.0)
    })
}

/// Normalized Gaussian packet with |psi|^2 = N(x0, sigma0^2) and mean
/// momentum hbar k0.
pub fn gaussian_packet(grid: &Grid1D, x0: f64, sigma0: f64, k0: f64) -> ComplexField {
    let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma0 * sigma0).powf(0.25);
    ComplexField::from_fn(grid.clone(), |x| {
        let envelope = norm * (-(x - x0) * (x - x0) / (4.0 * sigma0 * sigma0)).exp();
        Complex64::from_polar(envelope, k0 * x)
    })
}

/// Position variance of a free Gaussian packet:
/// sigma^2(t) = sigma0^2 (1 + (hbar t / 2 m sigma0^2)^2).
pub fn free_packet_variance(t: f64, sigma0: f64, mass: f64, hbar: f64) -> f64 {
    let rate = hbar * t / (2.0 * mass * sigma0 * sigma0);
    sigma0 * sigma0 * (1.0 + rate * rate)
}

/// Closed-form free evolution of the zero-momentum Gaussian packet:
/// psi(x,t) = (2 pi sigma0^2)^(-1/4) (1 + i tau)^(-1/2)
///            exp(-x^2 / (4 sigma0^2 (1 + i tau)))
/// with tau = hbar t / (2 m sigma0^2). Exact reference for convergence
/// studies, independent of any stepper.
pub fn free_gaussian_analytic(
    grid: &Grid1D,
    sigma0: f64,
    t: f64,
    mass: f64,
    hbar: f64,
) -> ComplexField {
    let tau = hbar * t / (2.0 * mass * sigma0 * sigma0);
    let width = Complex64::new(1.0, tau);
    let norm = Complex64::new(
        1.0 / (2.0 * std::f64::consts::PI * sigma0 * sigma0).powf(0.25),
        0.0,
    ) / width.sqrt();
    ComplexField::from_fn(grid.clone(), |x| {
        norm * (-Complex64::new(x * x / (4.0 * sigma0 * sigma0), 0.0) / width).exp()
    })
}
