use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{Boundary, ComplexField, Grid1D};
use crate::schrodinger::Potential;

/// Conservative default step: 0.1 * m * dx^2 / hbar, an order of magnitude
/// below the scale where the kinetic phase per step becomes O(1).
pub fn default_dt(grid: &Grid1D, mass: f64, hbar: f64) -> f64 {
    0.1 * mass * grid.dx() * grid.dx() / hbar
}

/// Crank-Nicolson propagator for i hbar dpsi/dt = H psi with the three-point
/// Laplacian. The scheme is (1 + i mu H) psi' = (1 - i mu H) psi with
/// mu = dt/(2 hbar); it is exactly unitary for the discrete H, so the norm
/// is conserved to rounding regardless of step count.
///
/// Clamped grids impose Dirichlet walls (psi = 0 outside); periodic grids
/// wrap the stencil and are solved with one extra Sherman-Morrison
/// correction on top of the same tridiagonal factorization.
pub struct CrankNicolson {
    grid: Grid1D,
    dt: f64,
    lhs_off: Complex64,
    rhs_off: Complex64,
    rhs_diag: Vec<Complex64>,
    // Precomputed Thomas factorization of the (corner-free) LHS.
    c_prime: Vec<Complex64>,
    denom: Vec<Complex64>,
    // Sherman-Morrison data for the periodic corner entries.
    periodic: Option<PeriodicCorrection>,
}

struct PeriodicCorrection {
    z: Vec<Complex64>,
    v_last: Complex64,
    denom: Complex64,
}

impl CrankNicolson {
    pub fn new(
        grid: &Grid1D,
        potential: &Potential,
        mass: f64,
        hbar: f64,
        dt: f64,
    ) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) || !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::Domain(format!(
                "propagator needs mass > 0 and hbar > 0, got m={mass}, hbar={hbar}"
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!("propagator needs dt > 0, got {dt}")));
        }
        let n = grid.len();
        if n < 4 {
            return Err(Error::Dimension(
                "propagator needs at least 4 grid points".into(),
            ));
        }
        let v = potential.values(grid, mass)?;
        let dx = grid.dx();
        let mu = dt / (2.0 * hbar);
        let h_off = -hbar * hbar / (2.0 * mass * dx * dx);
        let h_diag0 = hbar * hbar / (mass * dx * dx);

        let i = Complex64::new(0.0, 1.0);
        let lhs_off = i * mu * h_off;
        let rhs_off = -lhs_off;
        let mut lhs_diag = Vec::with_capacity(n);
        let mut rhs_diag = Vec::with_capacity(n);
        for &vi in &v {
            let h = h_diag0 + vi;
            lhs_diag.push(Complex64::new(1.0, 0.0) + i * mu * h);
            rhs_diag.push(Complex64::new(1.0, 0.0) - i * mu * h);
        }

        let periodic_data = match grid.boundary() {
            Boundary::Clamped => None,
            Boundary::Periodic => {
                // Fold the corner entries into a rank-one update A = A' + u v^T
                // with u = (gamma, 0, .., 0, beta), v = (1, 0, .., 0, beta/gamma).
                let gamma = -lhs_diag[0];
                let beta = lhs_off;
                lhs_diag[0] -= gamma;
                lhs_diag[n - 1] -= beta * beta / gamma;
                Some((gamma, beta))
            }
        };

        // Thomas factorization of the tridiagonal LHS (constant off-diagonal).
        let mut c_prime = vec![Complex64::default(); n];
        let mut denom = vec![Complex64::default(); n];
        denom[0] = lhs_diag[0];
        c_prime[0] = lhs_off / denom[0];
        for k in 1..n {
            denom[k] = lhs_diag[k] - lhs_off * c_prime[k - 1];
            if denom[k].norm() == 0.0 {
                return Err(Error::Numeric("singular tridiagonal factorization".into()));
            }
            c_prime[k] = lhs_off / denom[k];
        }

        let mut cn = CrankNicolson {
            grid: grid.clone(),
            dt,
            lhs_off,
            rhs_off,
            rhs_diag,
            c_prime,
            denom,
            periodic: None,
        };

        if let Some((gamma, beta)) = periodic_data {
            let mut u = vec![Complex64::default(); n];
            u[0] = gamma;
            u[n - 1] = beta;
            let z = cn.solve_tridiag(&u);
            let v_last = beta / gamma;
            let denom = Complex64::new(1.0, 0.0) + z[0] + v_last * z[n - 1];
            if denom.norm() == 0.0 {
                return Err(Error::Numeric("singular periodic correction".into()));
            }
            cn.periodic = Some(PeriodicCorrection { z, v_last, denom });
        }

        Ok(cn)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn solve_tridiag(&self, d: &[Complex64]) -> Vec<Complex64> {
        let n = d.len();
        let mut x = vec![Complex64::default(); n];
        x[0] = d[0] / self.denom[0];
        for k in 1..n {
            x[k] = (d[k] - self.lhs_off * x[k - 1]) / self.denom[k];
        }
        for k in (0..n - 1).rev() {
            let next = x[k + 1];
            x[k] -= self.c_prime[k] * next;
        }
        x
    }

    /// Advance psi by one step of dt.
    pub fn step(&self, psi: &mut ComplexField) -> Result<()> {
        if psi.grid() != &self.grid {
            return Err(Error::Dimension(
                "state grid does not match propagator grid".into(),
            ));
        }
        let n = self.grid.len();
        let vals = psi.values();
        let mut rhs = Vec::with_capacity(n);
        for i in 0..n {
            let (prev, next) = match self.grid.boundary() {
                Boundary::Periodic => (vals[(i + n - 1) % n], vals[(i + 1) % n]),
                Boundary::Clamped => (
                    if i > 0 {
                        vals[i - 1]
                    } else {
                        Complex64::default()
                    },
                    if i + 1 < n {
                        vals[i + 1]
                    } else {
                        Complex64::default()
                    },
                ),
            };
            rhs.push(self.rhs_diag[i] * vals[i] + self.rhs_off * (prev + next));
        }

        let mut x = self.solve_tridiag(&rhs);
        if let Some(p) = &self.periodic {
            let vy = x[0] + p.v_last * x[n - 1];
            let scale = vy / p.denom;
            for (xi, zi) in x.iter_mut().zip(&p.z) {
                *xi -= scale * zi;
            }
        }
        psi.values_mut().copy_from_slice(&x);
        Ok(())
    }
}
