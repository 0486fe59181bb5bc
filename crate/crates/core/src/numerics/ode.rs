use crate::error::{Error, Result};
use crate::numerics::Scalar;

/// One classical Runge-Kutta step for y' = rhs(t, y).
///
/// The right-hand side is called four times; any non-finite output aborts the
/// step with a numeric error rather than letting NaNs propagate silently.
pub fn rk4_step<T, F>(t: f64, state: &[T], dt: f64, rhs: F) -> Result<Vec<T>>
where
    T: Scalar,
    F: Fn(f64, &[T]) -> Vec<T>,
{
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!("rk4 step needs dt > 0, got {dt}")));
    }
    let eval = |t: f64, y: &[T]| -> Result<Vec<T>> {
        let k = rhs(t, y);
        if k.len() != state.len() {
            return Err(Error::Dimension(format!(
                "rhs returned {} components for a {}-component state",
                k.len(),
                state.len()
            )));
        }
        if k.iter().any(|v| !v.is_finite_value()) {
            return Err(Error::Numeric("rhs produced a non-finite value".into()));
        }
        Ok(k)
    };

    let add_scaled = |y: &[T], k: &[T], s: f64| -> Vec<T> {
        y.iter().zip(k).map(|(&a, &b)| a + b * s).collect()
    };

    let k1 = eval(t, state)?;
    let k2 = eval(t + dt / 2.0, &add_scaled(state, &k1, dt / 2.0))?;
    let k3 = eval(t + dt / 2.0, &add_scaled(state, &k2, dt / 2.0))?;
    let k4 = eval(t + dt, &add_scaled(state, &k3, dt))?;

    let sixth = dt / 6.0;
    Ok(state
        .iter()
        .enumerate()
        .map(|(i, &y)| y + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * sixth)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_single_step() {
        // y' = -y, y(0) = 1: one step of dt = 0.1 should match exp(-0.1)
        // to the classical O(dt^5) local error.
        let out = rk4_step(0.0, &[1.0f64], 0.1, |_, y| vec![-y[0]]).unwrap();
        assert!((out[0] - (-0.1f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn fourth_order_convergence() {
        // Integrate y' = y over [0, 1]; halving dt should cut the error ~16x.
        let run = |steps: usize| {
            let dt = 1.0 / steps as f64;
            let mut y = vec![1.0f64];
            let mut t = 0.0;
            for _ in 0..steps {
                y = rk4_step(t, &y, dt, |_, y| vec![y[0]]).unwrap();
                t += dt;
            }
            (y[0] - 1.0f64.exp()).abs()
        };
        let e1 = run(32);
        let e2 = run(64);
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn nonfinite_rhs_is_an_error() {
        let res = rk4_step(0.0, &[1.0f64], 0.1, |_, _| vec![f64::NAN]);
        assert!(matches!(res, Err(Error::Numeric(_))));
    }

    #[test]
    fn mismatched_rhs_is_an_error() {
        let res = rk4_step(0.0, &[1.0f64, 2.0], 0.1, |_, _| vec![0.0]);
        assert!(matches!(res, Err(Error::Dimension(_))));
    }
}
