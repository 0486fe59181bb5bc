use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::Boundary;

/// Element types the stencils operate on (real and complex samples).
pub trait Scalar:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
    fn is_finite_value(&self) -> bool;
}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

fn check_input<T: Scalar>(values: &[T], dx: f64) -> Result<()> {
    if values.len() < 3 {
        return Err(Error::Dimension(format!(
            "stencil needs at least 3 samples, got {}",
            values.len()
        )));
    }
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::Domain(format!("stencil needs dx > 0, got {dx}")));
    }
    Ok(())
}

/// Second-order first derivative: centered differences in the interior,
/// periodic wrap or one-sided three-point stencils at the edges.
pub fn central_gradient<T: Scalar>(values: &[T], dx: f64, boundary: Boundary) -> Result<Vec<T>> {
    check_input(values, dx)?;
    let n = values.len();
    let inv2 = 1.0 / (2.0 * dx);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = match boundary {
            Boundary::Periodic => {
                let prev = values[(i + n - 1) % n];
                let next = values[(i + 1) % n];
                (next - prev) * inv2
            }
            Boundary::Clamped => {
                if i == 0 {
                    // (-3 f0 + 4 f1 - f2) / (2 dx), exact on quadratics
                    (values[1] * 4.0 - values[0] * 3.0 - values[2]) * inv2
                } else if i == n - 1 {
                    (values[n - 1] * 3.0 - values[n - 2] * 4.0 + values[n - 3]) * inv2
                } else {
                    (values[i + 1] - values[i - 1]) * inv2
                }
            }
        };
        out.push(d);
    }
    Ok(out)
}

/// Second-order second derivative: three-point stencil in the interior,
/// periodic wrap or one-sided four-point stencils at the edges.
pub fn second_derivative<T: Scalar>(values: &[T], dx: f64, boundary: Boundary) -> Result<Vec<T>> {
    check_input(values, dx)?;
    let n = values.len();
    if boundary == Boundary::Clamped && n < 4 {
        return Err(Error::Dimension(
            "clamped second derivative needs at least 4 samples".into(),
        ));
    }
    let inv = 1.0 / (dx * dx);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = match boundary {
            Boundary::Periodic => {
                let prev = values[(i + n - 1) % n];
                let next = values[(i + 1) % n];
                (next + prev - values[i] * 2.0) * inv
            }
            Boundary::Clamped => {
                if i == 0 {
                    // (2 f0 - 5 f1 + 4 f2 - f3) / dx^2, exact on quadratics
                    (values[0] * 2.0 - values[1] * 5.0 + values[2] * 4.0 - values[3]) * inv
                } else if i == n - 1 {
                    (values[n - 1] * 2.0 - values[n - 2] * 5.0 + values[n - 3] * 4.0
                        - values[n - 4])
                        * inv
                } else {
                    (values[i + 1] + values[i - 1] - values[i] * 2.0) * inv
                }
            }
        };
        out.push(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_exact_on_quadratic() {
        // Exactness on polynomials of degree <= 2 holds at the edges too.
        let dx = 0.1;
        let vals: Vec<f64> = (0..20)
            .map(|i| {
                let x = i as f64 * dx;
                3.0 * x * x - 2.0 * x + 1.0
            })
            .collect();
        let grad = central_gradient(&vals, dx, Boundary::Clamped).unwrap();
        for (i, g) in grad.iter().enumerate() {
            let x = i as f64 * dx;
            assert!((g - (6.0 * x - 2.0)).abs() < 1e-12, "i={i}");
        }
    }

    #[test]
    fn gradient_second_order_on_sine() {
        // Error should drop ~4x when dx halves.
        let err = |n: usize| {
            let dx = 2.0 * std::f64::consts::PI / n as f64;
            let vals: Vec<f64> = (0..n).map(|i| (i as f64 * dx).sin()).collect();
            let grad = central_gradient(&vals, dx, Boundary::Periodic).unwrap();
            grad.iter()
                .enumerate()
                .map(|(i, g)| (g - (i as f64 * dx).cos()).abs())
                .fold(0.0f64, f64::max)
        };
        let e1 = err(64);
        let e2 = err(128);
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn second_derivative_exact_on_quadratic() {
        let dx = 0.25;
        let vals: Vec<f64> = (0..16)
            .map(|i| {
                let x = i as f64 * dx;
                x * x - x
            })
            .collect();
        let d2 = second_derivative(&vals, dx, Boundary::Clamped).unwrap();
        for v in d2 {
            assert!((v - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_gradient_matches_parts() {
        let dx = 0.05;
        let vals: Vec<Complex64> = (0..50)
            .map(|i| {
                let x = i as f64 * dx;
                Complex64::new((2.0 * x).sin(), x * x)
            })
            .collect();
        let g = central_gradient(&vals, dx, Boundary::Clamped).unwrap();
        let re: Vec<f64> = vals.iter().map(|v| v.re).collect();
        let im: Vec<f64> = vals.iter().map(|v| v.im).collect();
        let gre = central_gradient(&re, dx, Boundary::Clamped).unwrap();
        let gim = central_gradient(&im, dx, Boundary::Clamped).unwrap();
        for i in 0..vals.len() {
            assert!((g[i].re - gre[i]).abs() < 1e-13);
            assert!((g[i].im - gim[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_short_input() {
        assert!(central_gradient(&[1.0, 2.0], 0.1, Boundary::Clamped).is_err());
        assert!(second_derivative(&[1.0, 2.0, 3.0], 0.1, Boundary::Clamped).is_err());
    }
}
