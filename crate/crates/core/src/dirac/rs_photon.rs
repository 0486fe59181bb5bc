use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::numerics::{Boundary, Grid1D};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Six-component field Psi = (F_plus, F_minus), each block a complex
/// 3-vector per grid point, evolving under
///
///   i hbar dPsi/dt = -i c hbar Sigma_z dPsi/dx + m c^2 beta Psi
///
/// with Sigma_z = diag(S_z, S_z) the spin-1 generator and beta the block swap
/// that mixes the two helicity signs. The mass term exists to allow helicity
/// flips; physics at m = 0 is recovered as a limit, which
/// [`super::massless_limit_study`] probes.
#[derive(Debug, Clone)]
pub struct RsDiracState {
    grid: Grid1D,
    f_plus: [Vec<Complex64>; 3],
    f_minus: [Vec<Complex64>; 3],
    mass: f64,
    speed: f64,
    hbar: f64,
}

impl RsDiracState {
    pub fn new(
        grid: Grid1D,
        f_plus: [Vec<Complex64>; 3],
        f_minus: [Vec<Complex64>; 3],
        mass: f64,
        speed: f64,
        hbar: f64,
    ) -> Result<Self> {
        for comp in f_plus.iter().chain(f_minus.iter()) {
            if comp.len() != grid.len() {
                return Err(Error::Dimension(format!(
                    "field component of length {} on a {}-point grid",
                    comp.len(),
                    grid.len()
                )));
            }
        }
        if !(mass.is_finite() && mass >= 0.0)
            || !(speed.is_finite() && speed > 0.0)
            || !(hbar.is_finite() && hbar > 0.0)
        {
            return Err(Error::Domain(format!(
                "need mass >= 0, speed > 0, hbar > 0, got m={mass}, c={speed}, hbar={hbar}"
            )));
        }
        Ok(RsDiracState {
            grid,
            f_plus,
            f_minus,
            mass,
            speed,
            hbar,
        })
    }

    /// Same field data with a different mass (for limit ladders).
    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        RsDiracState::new(
            self.grid.clone(),
            self.f_plus.clone(),
            self.f_minus.clone(),
            mass,
            self.speed,
            self.hbar,
        )
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn f_plus(&self) -> &[Vec<Complex64>; 3] {
        &self.f_plus
    }

    pub fn f_minus(&self) -> &[Vec<Complex64>; 3] {
        &self.f_minus
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

    /// All six components in (F+x, F+y, F+z, F-x, F-y, F-z) order.
    pub fn components(&self) -> [&[Complex64]; 6] {
        [
            &self.f_plus[0],
            &self.f_plus[1],
            &self.f_plus[2],
            &self.f_minus[0],
            &self.f_minus[1],
            &self.f_minus[2],
        ]
    }

    pub fn norm(&self) -> f64 {
        let sum: f64 = self
            .components()
            .iter()
            .flat_map(|c| c.iter())
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
        for comp in self.f_plus.iter_mut().chain(self.f_minus.iter_mut()) {
            for v in comp.iter_mut() {
                *v *= inv;
            }
        }
        Ok(())
    }

    /// L2 distance between two states on the same grid.
    pub fn distance(&self, other: &RsDiracState) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Dimension("states live on different grids".into()));
        }
        let mut sum = 0.0;
        for (a, b) in self.components().iter().zip(other.components().iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                sum += (x - y).norm_sqr();
            }
        }
        Ok((sum * self.grid.dx()).sqrt())
    }
}

/// The 6x6 block swap: beta = [[0, I3], [I3, 0]]. Squares to the identity.
pub fn beta_matrix() -> [[Complex64; 6]; 6] {
    let mut b = [[Complex64::ZERO; 6]; 6];
    for i in 0..3 {
        b[i][i + 3] = Complex64::ONE;
        b[i + 3][i] = Complex64::ONE;
    }
    b
}

/// Spin-1 z generator on Cartesian components: (S_z)_xy = -i, (S_z)_yx = i.
pub fn sigma_z_matrix() -> [[Complex64; 6]; 6] {
    let mut s = [[Complex64::ZERO; 6]; 6];
    for block in [0, 3] {
        s[block][block + 1] = -I;
        s[block + 1][block] = I;
    }
    s
}

/// Mode Hamiltonian H(k) = c hbar k Sigma_z + m c^2 beta.
pub fn h_matrix(k: f64, mass: f64, speed: f64, hbar: f64) -> [[Complex64; 6]; 6] {
    let mut h = sigma_z_matrix();
    let advect = speed * hbar * k;
    let rest = mass * speed * speed;
    for row in h.iter_mut() {
        for entry in row.iter_mut() {
            *entry *= advect;
        }
    }
    let beta = beta_matrix();
    for r in 0..6 {
        for c in 0..6 {
            h[r][c] += rest * beta[r][c];
        }
    }
    h
}

/// Unit helicity vectors: e(+1) = (1, i, 0)/sqrt(2), e(-1) = (1, -i, 0)/sqrt(2),
/// e(0) = (0, 0, 1). S_z e(s) = s e(s).
pub fn helicity_vector(s: i8) -> [Complex64; 3] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match s {
        1 => [
            Complex64::new(r, 0.0),
            Complex64::new(0.0, r),
            Complex64::ZERO,
        ],
        -1 => [
            Complex64::new(r, 0.0),
            Complex64::new(0.0, -r),
            Complex64::ZERO,
        ],
        0 => [Complex64::ZERO, Complex64::ZERO, Complex64::ONE],
        _ => panic!("helicity must be -1, 0, or +1"),
    }
}

/// Exact mode-wise stepper for the six-component equation.
///
/// In the helicity basis each (k, s) pair reduces to the 2x2 block
/// [[c hbar k s, m c^2], [m c^2, c hbar k s]] acting on the (F_plus, F_minus)
/// coefficients of e(s), with exponential
/// exp(-i c k s dt) (cos(phi) I - i sin(phi) sigma_x), phi = m c^2 dt / hbar.
pub struct RsDiracPropagator {
    grid: Grid1D,
    mass: f64,
    speed: f64,
    hbar: f64,
    dt: f64,
    /// Advection phases exp(-i c k s dt) for s = +1, -1, 0 would be three
    /// arrays, but s = 0 is trivial; store the s = +1 phases and conjugate.
    advect: Vec<Complex64>,
    cos_phi: f64,
    sin_phi: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl RsDiracPropagator {
    pub fn new(grid: &Grid1D, mass: f64, speed: f64, hbar: f64, dt: f64) -> Result<Self> {
        if grid.boundary() != Boundary::Periodic {
            return Err(Error::Domain(
                "the spectral stepper needs a periodic grid".into(),
            ));
        }
        if !(mass.is_finite() && mass >= 0.0)
            || !(speed.is_finite() && speed > 0.0)
            || !(hbar.is_finite() && hbar > 0.0)
            || !(dt.is_finite() && dt > 0.0)
        {
            return Err(Error::Domain(format!(
                "need mass >= 0, speed > 0, hbar > 0, dt > 0, got m={mass}, c={speed}, hbar={hbar}, dt={dt}"
            )));
        }
        let advect = grid
            .wavenumbers()
            .iter()
            .map(|k| Complex64::from_polar(1.0, -speed * k * dt))
            .collect();
        let phi = mass * speed * speed * dt / hbar;
        let mut planner = FftPlanner::new();
        Ok(RsDiracPropagator {
            grid: grid.clone(),
            mass,
            speed,
            hbar,
            dt,
            advect,
            cos_phi: phi.cos(),
            sin_phi: phi.sin(),
            forward: planner.plan_fft_forward(grid.len()),
            inverse: planner.plan_fft_inverse(grid.len()),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, state: &mut RsDiracState) -> Result<()> {
        if state.grid != self.grid {
            return Err(Error::Dimension(
                "state grid differs from the stepper's".into(),
            ));
        }
        if state.mass != self.mass || state.speed != self.speed || state.hbar != self.hbar {
            return Err(Error::Domain(
                "state physical constants differ from the stepper's".into(),
            ));
        }
        let n = self.grid.len();
        let mut buf: Vec<Vec<Complex64>> = state.components().iter().map(|c| c.to_vec()).collect();
        for b in buf.iter_mut() {
            self.forward.process(b);
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..n {
            let phase = self.advect[i];
            for block in [0usize, 3] {
                let fx = buf[block][i];
                let fy = buf[block + 1][i];
                let fz = buf[block + 2][i];
                // Helicity coefficients a(s) = <e(s), F>.
                let a_p = r * (fx - I * fy);
                let a_m = r * (fx + I * fy);
                buf[block][i] = a_p; // reuse slots: (a_p, a_m, a_0)
                buf[block + 1][i] = a_m;
                buf[block + 2][i] = fz;
            }
            for (slot, ph) in [(0usize, phase), (1, phase.conj()), (2, Complex64::ONE)] {
                let top = buf[slot][i];
                let bot = buf[slot + 3][i];
                let mixed_top = Complex64::new(self.cos_phi, 0.0) * top - I * self.sin_phi * bot;
                let mixed_bot = Complex64::new(self.cos_phi, 0.0) * bot - I * self.sin_phi * top;
                buf[slot][i] = ph * mixed_top;
                buf[slot + 3][i] = ph * mixed_bot;
            }
            for block in [0usize, 3] {
                let a_p = buf[block][i];
                let a_m = buf[block + 1][i];
                let a_0 = buf[block + 2][i];
                buf[block][i] = r * (a_p + a_m);
                buf[block + 1][i] = I * r * (a_p - a_m);
                buf[block + 2][i] = a_0;
            }
        }
        let scale = 1.0 / n as f64;
        for b in buf.iter_mut() {
            self.inverse.process(b);
            for v in b.iter_mut() {
                *v *= scale;
            }
        }
        let mut it = buf.into_iter();
        for comp in state.f_plus.iter_mut().chain(state.f_minus.iter_mut()) {
            *comp = it.next().expect("six buffers");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_mul(a: &[[Complex64; 6]; 6], b: &[[Complex64; 6]; 6]) -> [[Complex64; 6]; 6] {
        let mut out = [[Complex64::ZERO; 6]; 6];
        for r in 0..6 {
            for c in 0..6 {
                for k in 0..6 {
                    out[r][c] += a[r][k] * b[k][c];
                }
            }
        }
        out
    }

    #[test]
    fn beta_squares_to_identity_and_h_is_hermitian() {
        let beta = beta_matrix();
        let sq = mat_mul(&beta, &beta);
        for r in 0..6 {
            for c in 0..6 {
                let expected = if r == c {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                assert_eq!(sq[r][c], expected);
            }
        }
        for &k in &[-3.0, 0.0, 1.7] {
            let h = h_matrix(k, 0.4, 1.2, 0.9);
            for r in 0..6 {
                for c in 0..6 {
                    assert!(
                        (h[r][c] - h[c][r].conj()).norm() < 1e-15,
                        "H not hermitian at {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn helicity_vectors_are_sz_eigenvectors() {
        let sz = sigma_z_matrix();
        for s in [-1i8, 0, 1] {
            let e = helicity_vector(s);
            for r in 0..3 {
                let mut out = Complex64::ZERO;
                for c in 0..3 {
                    out += sz[r][c] * e[c];
                }
                let expected = Complex64::new(s as f64, 0.0) * e[r];
                assert!((out - expected).norm() < 1e-15);
            }
        }
    }

    fn packet(grid: &Grid1D, width: f64) -> Vec<Complex64> {
        grid.points()
            .map(|x| Complex64::new((-x * x / (2.0 * width * width)).exp(), 0.0))
            .collect()
    }

    fn helicity_state(grid: &Grid1D, s: i8, envelope: &[Complex64], mass: f64) -> RsDiracState {
        let e = helicity_vector(s);
        let zeros = vec![Complex64::ZERO; grid.len()];
        let f_plus = [
            envelope.iter().map(|g| g * e[0]).collect(),
            envelope.iter().map(|g| g * e[1]).collect(),
            envelope.iter().map(|g| g * e[2]).collect(),
        ];
        let f_minus = [zeros.clone(), zeros.clone(), zeros];
        let mut st = RsDiracState::new(grid.clone(), f_plus, f_minus, mass, 1.0, 1.0).unwrap();
        st.normalize().unwrap();
        st
    }

    #[test]
    fn massless_positive_helicity_advects_at_plus_c() {
        let grid = Grid1D::new(-16.0, 16.0, 256, Boundary::Periodic).unwrap();
        let mut st = helicity_state(&grid, 1, &packet(&grid, 1.5), 0.0);
        let initial = st.clone();
        let prop = RsDiracPropagator::new(&grid, 0.0, 1.0, 1.0, 0.125).unwrap();
        let steps = 32; // t = 4 = 32 cells
        for _ in 0..steps {
            prop.step(&mut st).unwrap();
        }
        let cells = 32;
        for (a, b) in st.components().iter().zip(initial.components().iter()) {
            for i in 0..grid.len() {
                let from = (i + grid.len() - cells) % grid.len();
                assert!((a[i] - b[from]).norm() < 1e-10, "site {i}");
            }
        }
        // The opposite-helicity block never fills in at m = 0.
        assert!(st
            .f_minus()
            .iter()
            .all(|c| c.iter().all(|v| v.norm() < 1e-14)));
    }

    #[test]
    fn massless_zero_mode_is_stationary() {
        let grid = Grid1D::new(-8.0, 8.0, 128, Boundary::Periodic).unwrap();
        let mut st = helicity_state(&grid, 0, &packet(&grid, 1.0), 0.0);
        let initial = st.clone();
        let prop = RsDiracPropagator::new(&grid, 0.0, 1.0, 1.0, 0.1).unwrap();
        for _ in 0..50 {
            prop.step(&mut st).unwrap();
        }
        assert!(st.distance(&initial).unwrap() < 1e-12);
    }

    #[test]
    fn mass_mixes_helicity_blocks_but_conserves_norm() {
        let grid = Grid1D::new(-8.0, 8.0, 128, Boundary::Periodic).unwrap();
        let mut st = helicity_state(&grid, 1, &packet(&grid, 1.0), 0.6);
        let prop = RsDiracPropagator::new(&grid, 0.6, 1.0, 1.0, 0.01).unwrap();
        for _ in 0..1000 {
            prop.step(&mut st).unwrap();
        }
        assert!((st.norm() - 1.0).abs() < 1e-12, "norm {}", st.norm());
        let minus_mass: f64 = st
            .f_minus()
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            * grid.dx();
        assert!(
            minus_mass > 0.01,
            "mass term never flipped helicity: {minus_mass}"
        );
    }

    #[test]
    fn uniform_mode_oscillates_at_the_rest_frequency() {
        // k = 0: the block is m c^2 sigma_x, so F+ goes as cos(m c^2 t/hbar).
        let grid = Grid1D::new(0.0, 4.0, 16, Boundary::Periodic).unwrap();
        let ones = vec![Complex64::ONE; grid.len()];
        let mut st = helicity_state(&grid, 1, &ones, 0.8);
        let amp0 = st.f_plus()[0][0];
        let dt = 0.05;
        let prop = RsDiracPropagator::new(&grid, 0.8, 1.0, 1.0, dt).unwrap();
        for step in 1..=40 {
            prop.step(&mut st).unwrap();
            let t = step as f64 * dt;
            let expected = amp0 * (0.8 * t).cos();
            assert!(
                (st.f_plus()[0][0] - expected).norm() < 1e-12,
                "t={t}: {} vs {expected}",
                st.f_plus()[0][0]
            );
        }
    }
}
