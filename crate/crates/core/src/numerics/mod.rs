//! Shared numerical kernels: the 1D grid, counter-based RNG streams,
//! finite-difference stencils, and the RK4 stepper every module builds on.

mod gradient;
mod grid;
mod ode;
mod rng;

pub use gradient::{central_gradient, second_derivative, Scalar};
pub use grid::{Boundary, ComplexField, Grid1D};
pub use ode::rk4_step;
pub use rng::RngStream;

/// Rectangle-rule quadrature sum(f) * dx. With grid points at x_min + i*dx
/// (right endpoint excluded) this is exact in the periodic sense and
/// spectrally accurate for functions that decay inside the box.
pub fn integrate(values: &[f64], dx: f64) -> f64 {
    values.iter().sum::<f64>() * dx
}

/// Cumulative trapezoid: out[0] = 0, out[i] = integral from x[0] to x[i].
pub fn cumulative_trapezoid(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * dx;
        out.push(acc);
    }
    out
}

/// Least-squares slope of log(y) against log(x). Used to fit empirical
/// convergence orders and Monte Carlo scaling exponents.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> crate::error::Result<f64> {
    use crate::error::Error;
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Dimension(format!(
            "log_log_slope needs matched inputs of length >= 2, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs
        .iter()
        .chain(ys.iter())
        .any(|&v| v <= 0.0 || !v.is_finite())
    {
        return Err(Error::Domain(
            "log_log_slope requires strictly positive finite samples".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        return Err(Error::Domain("log_log_slope: degenerate abscissae".into()));
    }
    Ok(num / den)
}
