use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::numerics::{Boundary, Grid1D, RngStream};

/// Densities of right-movers (p_plus) and left-movers (p_minus) for the
/// two-speed flip process
///
///   dP(+-)/dt = -a (P(+-) - P(-+)) -+ v dP(+-)/dx.
///
/// States are usually probability-normalized (total_probability ~ 1) but the
/// type does not force it; closed-form checks use unnormalized data too.
#[derive(Debug, Clone)]
pub struct TelegraphState {
    grid: Grid1D,
    p_plus: Vec<f64>,
    p_minus: Vec<f64>,
    speed: f64,
    rate: f64,
}

impl TelegraphState {
    pub fn new(
        grid: Grid1D,
        p_plus: Vec<f64>,
        p_minus: Vec<f64>,
        speed: f64,
        rate: f64,
    ) -> Result<Self> {
        if p_plus.len() != grid.len() || p_minus.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "densities of length {} and {} on a {}-point grid",
                p_plus.len(),
                p_minus.len(),
                grid.len()
            )));
        }
        if p_plus
            .iter()
            .chain(p_minus.iter())
            .any(|p| !p.is_finite() || *p < 0.0)
        {
            return Err(Error::Domain(
                "densities must be finite and nonnegative".into(),
            ));
        }
        if !(speed.is_finite() && speed >= 0.0) || !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Domain(format!(
                "need speed >= 0 and rate >= 0, got v={speed}, a={rate}"
            )));
        }
        Ok(TelegraphState {
            grid,
            p_plus,
            p_minus,
            speed,
            rate,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn p_plus(&self) -> &[f64] {
        &self.p_plus
    }

    pub fn p_minus(&self) -> &[f64] {
        &self.p_minus
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn total_probability(&self) -> f64 {
        (self.p_plus.iter().sum::<f64>() + self.p_minus.iter().sum::<f64>()) * self.grid.dx()
    }

    /// Mass per coarse bin, (plus, minus), summing `factor` adjacent cells.
    /// Lets noisy Monte Carlo histograms be compared on fewer, fatter bins.
    pub fn binned_mass(&self, factor: usize) -> Result<Vec<(f64, f64)>> {
        let n = self.grid.len();
        if factor == 0 || !n.is_multiple_of(factor) {
            return Err(Error::Domain(format!(
                "bin factor {factor} must divide the {n} grid cells"
            )));
        }
        let dx = self.grid.dx();
        Ok((0..n / factor)
            .map(|b| {
                let cells = b * factor..(b + 1) * factor;
                (
                    self.p_plus[cells.clone()].iter().sum::<f64>() * dx,
                    self.p_minus[cells].iter().sum::<f64>() * dx,
                )
            })
            .collect())
    }

    /// One operator-split step: first-order upwind advection at speed -+v,
    /// then the exact exponential of the flip term, which preserves the sum
    /// p_plus + p_minus pointwise and decays the difference by e^(-2 a dt).
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!("step needs dt > 0, got {dt}")));
        }
        let dx = self.grid.dx();
        let nu = self.speed * dt / dx;
        if nu > 1.0 + 1e-12 {
            return Err(Error::Stability(format!(
                "advection would outrun the grid: v dt/dx = {nu:.6} > 1"
            )));
        }
        let nu = nu.min(1.0);
        let n = self.grid.len();
        let periodic = self.grid.boundary() == Boundary::Periodic;
        if nu > 0.0 {
            let old_plus = std::mem::take(&mut self.p_plus);
            let old_minus = std::mem::take(&mut self.p_minus);
            self.p_plus = (0..n)
                .map(|i| {
                    let left = if i > 0 {
                        old_plus[i - 1]
                    } else if periodic {
                        old_plus[n - 1]
                    } else {
                        0.0
                    };
                    (1.0 - nu) * old_plus[i] + nu * left
                })
                .collect();
            self.p_minus = (0..n)
                .map(|i| {
                    let right = if i + 1 < n {
                        old_minus[i + 1]
                    } else if periodic {
                        old_minus[0]
                    } else {
                        0.0
                    };
                    (1.0 - nu) * old_minus[i] + nu * right
                })
                .collect();
        }
        if self.rate > 0.0 {
            let decay = (-2.0 * self.rate * dt).exp();
            for (p, m) in self.p_plus.iter_mut().zip(self.p_minus.iter_mut()) {
                let mean = 0.5 * (*p + *m);
                let half_diff = 0.5 * (*p - *m) * decay;
                *p = mean + half_diff;
                *m = mean - half_diff;
            }
        }
        Ok(())
    }
}

/// Monte Carlo estimate of the same process plus per-walker flip counts.
#[derive(Debug, Clone)]
pub struct McTelegraph {
    /// Histogram densities on the initial state's grid, scaled so the total
    /// mass matches the initial state's.
    pub state: TelegraphState,
    /// Direction reversals per walker; Poisson(rate * t_final) in law.
    pub flip_counts: Vec<u32>,
}

/// Runs `n_walkers` independent two-speed walkers to `t_final`.
///
/// Walkers start from the initial state's (position, direction) distribution
/// (piecewise-constant per cell), fly ballistically at -+v, and reverse
/// direction at Exponential(rate) waiting times drawn from per-walker
/// sub-streams of `key`.
pub fn telegraph_monte_carlo(
    initial: &TelegraphState,
    t_final: f64,
    n_walkers: usize,
    key: RngStream,
) -> Result<McTelegraph> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::Domain(format!(
            "Monte Carlo run needs t_final > 0, got {t_final}"
        )));
    }
    if n_walkers == 0 {
        return Err(Error::Domain(
            "Monte Carlo run needs at least one walker".into(),
        ));
    }
    let grid = initial.grid();
    let n = grid.len();
    let dx = grid.dx();

    // Cumulative mass over (direction, cell): first the 2n cell masses, then
    // walkers invert it with a single uniform, reusing the in-segment
    // remainder as the position inside the cell.
    let mut cumulative = Vec::with_capacity(2 * n);
    let mut acc = 0.0;
    for p in initial.p_plus().iter().chain(initial.p_minus()) {
        acc += p * dx;
        cumulative.push(acc);
    }
    let total = acc;
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::DegenerateState(format!(
            "initial state has total mass {total}; nothing to sample"
        )));
    }

    let rate = initial.rate();
    let speed = initial.speed();
    let flip_law = if rate > 0.0 {
        Some(Exp::new(rate).map_err(|e| Error::Domain(format!("bad flip rate {rate}: {e}")))?)
    } else {
        None
    };

    let mut plus_counts = vec![0u64; n];
    let mut minus_counts = vec![0u64; n];
    let mut flip_counts = Vec::with_capacity(n_walkers);
    let periodic = grid.boundary() == Boundary::Periodic;
    let span = grid.x_max() - grid.x_min();

    for w in 0..n_walkers {
        let mut rng = key.substream(w as u64).rng();
        let target = rng.random::<f64>() * total;
        let slot = cumulative.partition_point(|c| *c <= target).min(2 * n - 1);
        let prev = if slot == 0 { 0.0 } else { cumulative[slot - 1] };
        let seg = cumulative[slot] - prev;
        let frac = if seg > 0.0 {
            (target - prev) / seg
        } else {
            0.5
        };
        let cell = slot % n;
        let mut dir: f64 = if slot < n { 1.0 } else { -1.0 };
        let mut x = grid.point(cell) + frac * dx;

        let mut remaining = t_final;
        let mut flips = 0u32;
        if let Some(law) = flip_law {
            loop {
                let tau = law.sample(&mut rng);
                if tau >= remaining {
                    break;
                }
                x += dir * speed * tau;
                remaining -= tau;
                dir = -dir;
                flips += 1;
            }
        }
        x += dir * speed * remaining;
        if periodic {
            x = grid.x_min() + (x - grid.x_min()).rem_euclid(span);
        }
        let cell = grid.cell_index(x);
        if dir > 0.0 {
            plus_counts[cell] += 1;
        } else {
            minus_counts[cell] += 1;
        }
        flip_counts.push(flips);
    }

    let scale = total / (n_walkers as f64 * dx);
    let p_plus: Vec<f64> = plus_counts.iter().map(|c| *c as f64 * scale).collect();
    let p_minus: Vec<f64> = minus_counts.iter().map(|c| *c as f64 * scale).collect();
    let state = TelegraphState::new(grid.clone(), p_plus, p_minus, speed, rate)?;
    Ok(McTelegraph { state, flip_counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_state_follows_the_two_level_solution() {
        // No spatial structure, so only the flip term acts: the exact
        // sub-step reproduces P(+-)(t) = (1 +- e^(-2at))/2 to rounding.
        let grid = Grid1D::new(0.0, 1.0, 16, Boundary::Periodic).unwrap();
        let n = grid.len();
        let mut st = TelegraphState::new(grid, vec![1.0; n], vec![0.0; n], 0.5, 1.0).unwrap();
        let dt = 0.01;
        for _ in 0..100 {
            st.step(dt).unwrap();
        }
        let decay = (-2.0f64).exp();
        for (p, m) in st.p_plus().iter().zip(st.p_minus()) {
            assert!((p - 0.5 * (1.0 + decay)).abs() < 1e-8, "p={p}");
            assert!((m - 0.5 * (1.0 - decay)).abs() < 1e-8, "m={m}");
        }
    }

    #[test]
    fn rateless_box_advects_rigidly() {
        let grid = Grid1D::new(0.0, 64.0, 64, Boundary::Periodic).unwrap();
        let n = grid.len();
        let mut p = vec![0.0; n];
        for cell in p.iter_mut().take(20).skip(10) {
            *cell = 1.0;
        }
        let mut st = TelegraphState::new(grid, p.clone(), vec![0.0; n], 1.0, 0.0).unwrap();
        for _ in 0..7 {
            st.step(1.0).unwrap(); // nu = 1: exact shift
        }
        for (i, v) in st.p_plus().iter().enumerate() {
            let expected = if (17..27).contains(&i) { 1.0 } else { 0.0 };
            assert_eq!(*v, expected, "cell {i}");
        }
        assert!(st.p_minus().iter().all(|m| *m == 0.0));
    }

    #[test]
    fn probability_survives_ten_thousand_steps() {
        let grid = Grid1D::new(-8.0, 8.0, 128, Boundary::Periodic).unwrap();
        let dx = grid.dx();
        let raw: Vec<f64> = grid.points().map(|x| (-x * x / 2.0).exp()).collect();
        let mass: f64 = raw.iter().sum::<f64>() * dx * 2.0;
        let p: Vec<f64> = raw.iter().map(|r| r / mass).collect();
        let mut st = TelegraphState::new(grid, p.clone(), p, 1.0, 0.7).unwrap();
        assert!((st.total_probability() - 1.0).abs() < 1e-12);
        let dt = 0.9 * dx;
        for _ in 0..10_000 {
            st.step(dt).unwrap();
        }
        assert!((st.total_probability() - 1.0).abs() < 1e-9);
        assert!(st.p_plus().iter().chain(st.p_minus()).all(|v| *v >= 0.0));
    }

    #[test]
    fn cfl_violation_is_a_stability_error() {
        let grid = Grid1D::new(0.0, 1.0, 16, Boundary::Periodic).unwrap();
        let n = grid.len();
        let mut st = TelegraphState::new(grid, vec![1.0; n], vec![0.0; n], 2.0, 0.0).unwrap();
        assert!(matches!(st.step(0.1), Err(Error::Stability(_))));
    }

    #[test]
    fn flipless_walkers_are_ballistic() {
        let grid = Grid1D::new(0.0, 32.0, 32, Boundary::Periodic).unwrap();
        let n = grid.len();
        let mut p = vec![0.0; n];
        p[4] = 1.0; // all mass in cell 4, right-movers
        let st = TelegraphState::new(grid, p, vec![0.0; n], 1.0, 0.0).unwrap();
        let mc = telegraph_monte_carlo(&st, 6.0, 2_000, RngStream::new(3, 0)).unwrap();
        assert!(mc.flip_counts.iter().all(|f| *f == 0));
        // v t = 6 cells to the right of cell 4.
        for (i, v) in mc.state.p_plus().iter().enumerate() {
            if i == 10 {
                assert!((v - 1.0).abs() < 1e-12, "cell 10 holds {v}");
            } else {
                assert_eq!(*v, 0.0, "cell {i}");
            }
        }
    }

    #[test]
    fn flip_counts_are_poisson_distributed() {
        let grid = Grid1D::new(-64.0, 64.0, 64, Boundary::Periodic).unwrap();
        let n = grid.len();
        let st = TelegraphState::new(grid, vec![1.0; n], vec![1.0; n], 1.0, 1.3).unwrap();
        let walkers = 100_000;
        let mc = telegraph_monte_carlo(&st, 2.0, walkers, RngStream::new(8, 1)).unwrap();
        let lambda = 1.3 * 2.0;
        let nf = walkers as f64;
        let mean = mc.flip_counts.iter().map(|f| *f as f64).sum::<f64>() / nf;
        let var = mc
            .flip_counts
            .iter()
            .map(|f| (*f as f64 - mean).powi(2))
            .sum::<f64>()
            / (nf - 1.0);
        let se_mean = (lambda / nf).sqrt();
        let se_var = ((lambda + 2.0 * lambda * lambda) / nf).sqrt();
        assert!(
            (mean - lambda).abs() < 3.0 * se_mean,
            "mean {mean} vs {lambda}"
        );
        assert!((var - lambda).abs() < 3.0 * se_var, "var {var} vs {lambda}");
    }

    #[test]
    fn walker_histogram_tracks_the_pde() {
        let grid = Grid1D::new(-8.0, 8.0, 512, Boundary::Periodic).unwrap();
        let dx = grid.dx();
        let raw: Vec<f64> = grid.points().map(|x| (-x * x / 2.0).exp()).collect();
        let mass: f64 = raw.iter().sum::<f64>() * dx;
        let p: Vec<f64> = raw.iter().map(|r| r / mass).collect();
        let n = grid.len();
        let initial = TelegraphState::new(grid, p, vec![0.0; n], 1.0, 1.0).unwrap();

        let mut pde = initial.clone();
        let dt = dx; // nu = 1
        let steps = (1.0 / dt).round() as usize;
        for _ in 0..steps {
            pde.step(dt).unwrap();
        }
        let t_final = steps as f64 * dt;
        let mc = telegraph_monte_carlo(&initial, t_final, 20_000, RngStream::new(17, 0)).unwrap();

        let coarse_pde = pde.binned_mass(16).unwrap();
        let coarse_mc = mc.state.binned_mass(16).unwrap();
        let l1: f64 = coarse_pde
            .iter()
            .zip(&coarse_mc)
            .map(|((pp, pm), (qp, qm))| (pp - qp).abs() + (pm - qm).abs())
            .sum();
        assert!(l1 < 0.06, "L1 distance {l1}");
    }

    #[test]
    fn binning_requires_an_exact_divisor() {
        let grid = Grid1D::new(0.0, 1.0, 16, Boundary::Periodic).unwrap();
        let n = grid.len();
        let st = TelegraphState::new(grid, vec![1.0; n], vec![0.0; n], 1.0, 0.0).unwrap();
        assert!(st.binned_mass(5).is_err());
        assert!(st.binned_mass(0).is_err());
        assert_eq!(st.binned_mass(4).unwrap().len(), 4);
    }
}
