use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{Boundary, Grid1D};

/// Null-aligned two-component lattice: sites dx apart, steps dt = dx/speed,
/// so every move is one site left or right (the light-cone lattice).
///
/// One step shifts right-movers by +dx and left-movers by -dx, then mixes the
/// components. The default mix is the literal path weight to first order,
///
///   M = [[1-w, w], [w, 1-w]],
///
/// whose n-step expansion sums every direction history with weight
/// w^(reversals) (1-w)^(steps - reversals). With w = rate*dt real this is the
/// stochastic flip process; with w = i m speed^2 dt / hbar it is the analytic
/// continuation of it. The exact-mixing variant replaces M by exp(w(sigma_x - I))
/// and splits it symmetrically around the shift (half mix, shift, half mix),
/// which is unitary for continued weights and second order in dt.
#[derive(Debug, Clone)]
pub struct CheckerboardLattice {
    grid: Grid1D,
    n_steps: usize,
    speed: f64,
    flip_weight: Complex64,
    exact_mixing: bool,
}

impl CheckerboardLattice {
    pub fn new(grid: Grid1D, n_steps: usize, speed: f64, flip_weight: Complex64) -> Result<Self> {
        if grid.boundary() != Boundary::Periodic {
            return Err(Error::Domain(
                "the light-cone lattice shifts whole components; use a periodic grid".into(),
            ));
        }
        if n_steps == 0 {
            return Err(Error::Domain("lattice needs n_steps >= 1".into()));
        }
        if !(speed.is_finite() && speed > 0.0) {
            return Err(Error::Domain(format!(
                "lattice needs speed > 0, got {speed}"
            )));
        }
        if !flip_weight.re.is_finite() || !flip_weight.im.is_finite() {
            return Err(Error::Domain(format!(
                "flip weight must be finite, got {flip_weight}"
            )));
        }
        Ok(CheckerboardLattice {
            grid,
            n_steps,
            speed,
            flip_weight,
            exact_mixing: false,
        })
    }

    /// Real flip weight w = rate * dt: the two-speed stochastic process.
    pub fn stochastic(grid: Grid1D, n_steps: usize, speed: f64, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Domain(format!("flip rate must be >= 0, got {rate}")));
        }
        let dt = grid.dx() / speed;
        CheckerboardLattice::new(grid, n_steps, speed, Complex64::new(rate * dt, 0.0))
    }

    /// Continued weight w = i m speed^2 dt / hbar: amplitudes instead of
    /// probabilities, reversal weights rotated onto the imaginary axis.
    pub fn continued(
        grid: Grid1D,
        n_steps: usize,
        speed: f64,
        mass: f64,
        hbar: f64,
    ) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) || !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::Domain(format!(
                "continuation needs mass >= 0 and hbar > 0, got m={mass}, hbar={hbar}"
            )));
        }
        let dt = grid.dx() / speed;
        let w = Complex64::new(0.0, mass * speed * speed * dt / hbar);
        CheckerboardLattice::new(grid, n_steps, speed, w)
    }

    pub fn with_exact_mixing(mut self, on: bool) -> Self {
        self.exact_mixing = on;
        self
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.grid.dx() / self.speed
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn flip_weight(&self) -> Complex64 {
        self.flip_weight
    }

    pub fn exact_mixing(&self) -> bool {
        self.exact_mixing
    }

    /// The per-step mixing matrix [[keep, flip], [flip, keep]].
    pub fn mixing_matrix(&self) -> [[Complex64; 2]; 2] {
        if self.exact_mixing {
            exact_mix(self.flip_weight)
        } else {
            let w = self.flip_weight;
            let keep = Complex64::ONE - w;
            [[keep, w], [w, keep]]
        }
    }

    /// Run all n_steps on the given component pair.
    pub fn propagate(
        &self,
        plus: &[Complex64],
        minus: &[Complex64],
    ) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let n = self.grid.len();
        if plus.len() != n || minus.len() != n {
            return Err(Error::Dimension(format!(
                "components of length {} and {} on a {}-site lattice",
                plus.len(),
                minus.len(),
                n
            )));
        }
        let mut p = plus.to_vec();
        let mut m = minus.to_vec();
        if self.exact_mixing {
            let half = exact_mix(0.5 * self.flip_weight);
            let full = exact_mix(self.flip_weight);
            mix(&mut p, &mut m, half);
            for step in 0..self.n_steps {
                shift(&mut p, &mut m);
                if step + 1 < self.n_steps {
                    mix(&mut p, &mut m, full);
                }
            }
            mix(&mut p, &mut m, half);
        } else {
            let first_order = self.mixing_matrix();
            for _ in 0..self.n_steps {
                shift(&mut p, &mut m);
                mix(&mut p, &mut m, first_order);
            }
        }
        Ok((p, m))
    }
}

/// exp(w (sigma_x - I)) = e^-w [[cosh w, sinh w], [sinh w, cosh w]].
fn exact_mix(w: Complex64) -> [[Complex64; 2]; 2] {
    let scale = (-w).exp();
    let keep = scale * w.cosh();
    let flip = scale * w.sinh();
    [[keep, flip], [flip, keep]]
}

fn shift(plus: &mut [Complex64], minus: &mut [Complex64]) {
    plus.rotate_right(1);
    minus.rotate_left(1);
}

fn mix(plus: &mut [Complex64], minus: &mut [Complex64], m: [[Complex64; 2]; 2]) {
    for (p, q) in plus.iter_mut().zip(minus.iter_mut()) {
        let new_p = m[0][0] * *p + m[0][1] * *q;
        let new_q = m[1][0] * *p + m[1][1] * *q;
        *p = new_p;
        *q = new_q;
    }
}

/// Brute-force path sum for a unit amplitude starting at `start_site` moving
/// right (`start_plus`) or left. Every direction history (d_0 .. d_n) with
/// d_0 fixed contributes w^(reversals) (1-w)^(n - reversals) at the site
/// reached by the moves d_0 .. d_(n-1), in the component d_n.
///
/// This is the defining expansion of the first-order transfer matrix, so it
/// must agree with `propagate` exactly; it exists as an independent oracle.
pub fn enumerate_paths(
    lattice: &CheckerboardLattice,
    start_site: usize,
    start_plus: bool,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = lattice.n_steps;
    if n > 24 {
        return Err(Error::Capacity(format!(
            "path enumeration walks 2^n histories; n_steps = {n} > 24"
        )));
    }
    if lattice.exact_mixing {
        return Err(Error::Domain(
            "the path expansion defines the first-order mixing; disable exact mixing".into(),
        ));
    }
    let sites = lattice.grid.len() as i64;
    if start_site as i64 >= sites {
        return Err(Error::Dimension(format!(
            "start site {start_site} outside the {sites}-site lattice"
        )));
    }
    let w = lattice.flip_weight;
    let keep = Complex64::ONE - w;
    let mut plus = vec![Complex64::ZERO; sites as usize];
    let mut minus = vec![Complex64::ZERO; sites as usize];
    for reversal_mask in 0u32..(1u32 << n) {
        let mut dir: i64 = if start_plus { 1 } else { -1 };
        let mut site = start_site as i64;
        let mut weight = Complex64::ONE;
        for k in 0..n {
            site += dir;
            if (reversal_mask >> k) & 1 == 1 {
                dir = -dir;
                weight *= w;
            } else {
                weight *= keep;
            }
        }
        let cell = site.rem_euclid(sites) as usize;
        if dir > 0 {
            plus[cell] += weight;
        } else {
            minus[cell] += weight;
        }
    }
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::telegraph::TelegraphState;

    fn unit_grid(sites: usize) -> Grid1D {
        Grid1D::new(0.0, sites as f64, sites, Boundary::Periodic).unwrap()
    }

    fn delta(sites: usize, at: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::ZERO; sites];
        v[at] = Complex64::ONE;
        v
    }

    #[test]
    fn zero_weight_is_a_pure_shift() {
        let lat = CheckerboardLattice::new(unit_grid(16), 5, 1.0, Complex64::ZERO).unwrap();
        let (p, m) = lat
            .propagate(&delta(16, 3), &vec![Complex64::ZERO; 16])
            .unwrap();
        for (i, v) in p.iter().enumerate() {
            let expected = if i == 8 {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            assert_eq!(*v, expected, "site {i}");
        }
        assert!(m.iter().all(|v| *v == Complex64::ZERO));
    }

    #[test]
    fn two_steps_place_the_four_reversal_weights() {
        let w = Complex64::new(0.3, -0.1);
        let keep = Complex64::ONE - w;
        let sites = 16;
        let start = 8;
        let lat = CheckerboardLattice::new(unit_grid(sites), 2, 1.0, w).unwrap();
        let (p, m) = lat
            .propagate(&delta(sites, start), &vec![Complex64::ZERO; sites])
            .unwrap();
        // Histories from a right-mover: (+,+,+) -> site+2 still right, no
        // reversal twice; (+,+,-) -> site+2 left, one reversal; (+,-,+) ->
        // site 0 right, two reversals; (+,-,-) -> site 0 left, one reversal.
        let tol = 1e-15;
        assert!((p[start + 2] - keep * keep).norm() < tol);
        assert!((m[start + 2] - keep * w).norm() < tol);
        assert!((p[start] - w * w).norm() < tol);
        assert!((m[start] - w * keep).norm() < tol);
        let leftovers: f64 = p
            .iter()
            .chain(&m)
            .enumerate()
            .filter(|(i, _)| i % sites != start && i % sites != start + 2)
            .map(|(_, v)| v.norm())
            .sum();
        assert!(leftovers < tol);

        let (ep, em) = enumerate_paths(&lat, start, true).unwrap();
        assert_eq!(p, ep);
        assert_eq!(m, em);
    }

    #[test]
    fn transfer_matrix_equals_path_sum_for_twelve_steps() {
        let sites = 32;
        let steps = 12;
        let w = Complex64::new(0.0, 0.21);
        let lat = CheckerboardLattice::new(unit_grid(sites), steps, 1.0, w).unwrap();
        // Linearity: check the full propagator column by column from a few
        // start sites and both start directions.
        for &(site, plus_start) in &[(5usize, true), (20, false), (31, true)] {
            let init_p = if plus_start {
                delta(sites, site)
            } else {
                vec![Complex64::ZERO; sites]
            };
            let init_m = if plus_start {
                vec![Complex64::ZERO; sites]
            } else {
                delta(sites, site)
            };
            let (tp, tm) = lat.propagate(&init_p, &init_m).unwrap();
            let (ep, em) = enumerate_paths(&lat, site, plus_start).unwrap();
            for i in 0..sites {
                assert!((tp[i] - ep[i]).norm() < 1e-12, "site {i} plus");
                assert!((tm[i] - em[i]).norm() < 1e-12, "site {i} minus");
            }
        }
    }

    #[test]
    fn mixing_matrix_properties_track_the_weight() {
        // Real weight, first order: a stochastic matrix.
        let real = CheckerboardLattice::stochastic(unit_grid(8), 1, 1.0, 0.4).unwrap();
        let m = real.mixing_matrix();
        for col in 0..2 {
            let sum = m[0][col] + m[1][col];
            assert!((sum - Complex64::ONE).norm() < 1e-15);
            for row in 0..2 {
                assert!(m[row][col].re >= 0.0 && m[row][col].im == 0.0);
            }
        }

        // Continued weight, first order: measurably non-unitary.
        let cont = CheckerboardLattice::continued(unit_grid(8), 1, 1.0, 0.1, 1.0).unwrap();
        let m = cont.mixing_matrix();
        let mut defect = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let mut dot = Complex64::ZERO;
                for k in 0..2 {
                    dot += m[k][i].conj() * m[k][j];
                }
                let target = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                defect = defect.max((dot - target).norm());
            }
        }
        assert!(
            defect > 1e-3,
            "first-order continued mix looked unitary: {defect}"
        );

        // Continued weight, exact exponential: unitary to rounding.
        let exact = cont.clone().with_exact_mixing(true);
        let m = exact.mixing_matrix();
        for i in 0..2 {
            for j in 0..2 {
                let mut dot = Complex64::ZERO;
                for k in 0..2 {
                    dot += m[k][i].conj() * m[k][j];
                }
                let target = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                assert!((dot - target).norm() < 1e-14);
            }
        }

        // Exact exponential of a real weight is still stochastic.
        let real_exact = real.with_exact_mixing(true);
        let m = real_exact.mixing_matrix();
        for col in 0..2 {
            let sum = m[0][col] + m[1][col];
            assert!((sum - Complex64::ONE).norm() < 1e-15);
            for row in 0..2 {
                assert!(m[row][col].re >= 0.0);
            }
        }
    }

    #[test]
    fn stochastic_lattice_tracks_the_telegraph_pde() {
        // Same initial bump, fixed physical time; the lattice's first-order
        // mixing differs from the exact exponential by O(dt), so halving dt
        // should roughly halve the disagreement.
        let err_at = |sites: usize| -> f64 {
            let grid = Grid1D::new(-8.0, 8.0, sites, Boundary::Periodic).unwrap();
            let dx = grid.dx();
            let bump: Vec<f64> = grid.points().map(|x| (-x * x).exp()).collect();
            let steps = (2.0 / dx).round() as usize; // t = 2 at nu = 1
            let rate = 0.8;

            let mut pde =
                TelegraphState::new(grid.clone(), bump.clone(), bump.clone(), 1.0, rate).unwrap();
            for _ in 0..steps {
                pde.step(dx).unwrap();
            }

            let lat = CheckerboardLattice::stochastic(grid, steps, 1.0, rate).unwrap();
            let to_c = |v: &[f64]| -> Vec<Complex64> {
                v.iter().map(|x| Complex64::new(*x, 0.0)).collect()
            };
            let (p, m) = lat.propagate(&to_c(&bump), &to_c(&bump)).unwrap();

            let mut worst = 0.0f64;
            for i in 0..pde.grid().len() {
                worst = worst.max((p[i].re - pde.p_plus()[i]).abs());
                worst = worst.max((m[i].re - pde.p_minus()[i]).abs());
            }
            worst
        };
        let coarse = err_at(64);
        let fine = err_at(128);
        assert!(coarse < 0.08, "coarse disagreement {coarse}");
        assert!(
            fine < 0.7 * coarse,
            "no first-order shrinkage: {coarse} -> {fine}"
        );
    }

    #[test]
    fn exact_mixing_conserves_the_continued_norm() {
        let grid = Grid1D::new(-16.0, 16.0, 128, Boundary::Periodic).unwrap();
        let dx = grid.dx();
        let packet: Vec<Complex64> = grid
            .points()
            .map(|x| Complex64::new((-x * x / 4.0).exp(), 0.0))
            .collect();
        let norm0: f64 = packet.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
        let lat = CheckerboardLattice::continued(grid, 100, 1.0, 0.5, 1.0)
            .unwrap()
            .with_exact_mixing(true);
        let (p, m) = lat.propagate(&packet, &vec![Complex64::ZERO; 128]).unwrap();
        let norm1: f64 = (p.iter().chain(&m).map(|v| v.norm_sqr()).sum::<f64>()) * dx;
        assert!((norm1 - norm0).abs() < 1e-12 * norm0, "{norm0} -> {norm1}");
    }

    #[test]
    fn lattice_rejects_bad_configs() {
        let clamped = Grid1D::new(0.0, 8.0, 8, Boundary::Clamped).unwrap();
        assert!(CheckerboardLattice::new(clamped, 1, 1.0, Complex64::ZERO).is_err());
        assert!(CheckerboardLattice::new(unit_grid(8), 0, 1.0, Complex64::ZERO).is_err());
        assert!(CheckerboardLattice::new(unit_grid(8), 1, 0.0, Complex64::ZERO).is_err());
        let lat = CheckerboardLattice::new(unit_grid(8), 30, 1.0, Complex64::ZERO).unwrap();
        assert!(matches!(
            enumerate_paths(&lat, 0, true),
            Err(Error::Capacity(_))
        ));
        let exact = CheckerboardLattice::new(unit_grid(8), 2, 1.0, Complex64::ZERO)
            .unwrap()
            .with_exact_mixing(true);
        assert!(enumerate_paths(&exact, 0, true).is_err());
    }
}
