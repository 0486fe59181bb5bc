use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{cumulative_trapezoid, Boundary, Grid1D, RngStream};
use crate::schrodinger::NelsonFields;

/// Drift data sampled on a grid, evaluated anywhere by linear interpolation.
///
/// `sigma` is the noise amplitude of the particle processes; sigma^2 is the
/// diffusion coefficient, fixed to hbar/m when built from a wavefunction.
#[derive(Debug, Clone)]
pub struct DriftSpec {
    grid: Grid1D,
    v: Vec<f64>,
    u: Vec<f64>,
    sigma: f64,
}

impl DriftSpec {
    pub fn new(grid: Grid1D, v: Vec<f64>, u: Vec<f64>, sigma: f64) -> Result<Self> {
        if v.len() != grid.len() || u.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "drift fields of length {} and {} on a {}-point grid",
                v.len(),
                u.len(),
                grid.len()
            )));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::Domain(format!(
                "noise amplitude must be finite and >= 0, got {sigma}"
            )));
        }
        if v.iter().chain(u.iter()).any(|c| !c.is_finite()) {
            return Err(Error::Numeric(
                "drift fields must be finite everywhere; fill masked points first".into(),
            ));
        }
        Ok(DriftSpec { grid, v, u, sigma })
    }

    /// Build drifts from wavefunction-derived fields with sigma^2 = hbar/m.
    ///
    /// Masked (near-zero density) nodes take the nearest unmasked value to
    /// their left, or the first one to their right for a leading gap, so the
    /// interpolant stays finite everywhere a particle can reach.
    pub fn from_fields(fields: &NelsonFields) -> Result<Self> {
        let sigma = (fields.hbar / fields.mass).sqrt();
        let v = fill_from_nearest(&fields.v)?;
        let u = fill_from_nearest(&fields.u)?;
        DriftSpec::new(fields.grid.clone(), v, u, sigma)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// (v, u) at an arbitrary position. Outside a clamped grid this returns
    /// the boundary value; on a periodic grid the interpolation wraps.
    pub fn velocities_at(&self, x: f64) -> (f64, f64) {
        (
            interpolate(&self.v, &self.grid, x),
            interpolate(&self.u, &self.grid, x),
        )
    }

    /// b_f = v + u.
    pub fn forward_drift_at(&self, x: f64) -> f64 {
        let (v, u) = self.velocities_at(x);
        v + u
    }

    /// b_b = v - u.
    pub fn backward_drift_at(&self, x: f64) -> f64 {
        let (v, u) = self.velocities_at(x);
        v - u
    }
}

fn interpolate(field: &[f64], grid: &Grid1D, x: f64) -> f64 {
    let n = field.len();
    let t = (x - grid.x_min()) / grid.dx();
    match grid.boundary() {
        Boundary::Clamped => {
            if t <= 0.0 {
                return field[0];
            }
            if t >= (n - 1) as f64 {
                return field[n - 1];
            }
            let i = t.floor() as usize;
            let frac = t - i as f64;
            field[i] * (1.0 - frac) + field[i + 1] * frac
        }
        Boundary::Periodic => {
            let tw = t.rem_euclid(n as f64);
            let i = (tw.floor() as usize).min(n - 1);
            let frac = tw - i as f64;
            field[i] * (1.0 - frac) + field[(i + 1) % n] * frac
        }
    }
}

fn fill_from_nearest(values: &[f64]) -> Result<Vec<f64>> {
    let mut out = values.to_vec();
    let mut carry = None;
    for v in out.iter_mut() {
        if v.is_finite() {
            carry = Some(*v);
        } else if let Some(c) = carry {
            *v = c;
        }
    }
    let mut carry = None;
    for v in out.iter_mut().rev() {
        if v.is_finite() {
            carry = Some(*v);
        } else if let Some(c) = carry {
            *v = c;
        }
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateState(
            "drift field has no valid points to extend from".into(),
        ));
    }
    Ok(out)
}

/// A cloud of independent walkers sharing one base RNG key.
///
/// Each particle owns the sub-stream `key.substream(particle_index)`, so the
/// realized paths do not depend on evaluation order and identical
/// (seed, config) pairs reproduce ensembles bit for bit.
#[derive(Debug, Clone)]
pub struct Ensemble {
    positions: Vec<f64>,
    time: f64,
    key: RngStream,
    streams: Vec<ChaCha8Rng>,
    boundary_events: u64,
}

impl Ensemble {
    /// All particles at one point (a delta-function start).
    pub fn at_point(n_particles: usize, x0: f64, key: RngStream) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::Domain(format!(
                "start position must be finite, got {x0}"
            )));
        }
        Ok(Self::assemble(vec![x0; n_particles], key))
    }

    pub fn from_positions(positions: Vec<f64>, key: RngStream) -> Result<Self> {
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("all positions must be finite".into()));
        }
        Ok(Self::assemble(positions, key))
    }

    /// Draw particles from a density sampled on a grid (inverse-CDF with
    /// linear interpolation between nodes). Each particle consumes one
    /// uniform from its own sub-stream before any stepping begins.
    pub fn from_density(
        n_particles: usize,
        grid: &Grid1D,
        density: &[f64],
        key: RngStream,
    ) -> Result<Self> {
        if density.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "density of length {} on a {}-point grid",
                density.len(),
                grid.len()
            )));
        }
        if density.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::Domain(
                "density must be finite and nonnegative".into(),
            ));
        }
        let cdf = cumulative_trapezoid(density, grid.dx());
        let total = *cdf.last().expect("grid guarantees >= 3 points");
        if total <= 0.0 {
            return Err(Error::DegenerateState(
                "density integrates to zero; nothing to sample".into(),
            ));
        }
        let mut ens = Self::assemble(vec![0.0; n_particles], key);
        for (x, rng) in ens.positions.iter_mut().zip(ens.streams.iter_mut()) {
            let target = rng.random::<f64>() * total;
            let k = cdf
                .partition_point(|c| *c <= target)
                .clamp(1, cdf.len() - 1);
            let seg = cdf[k] - cdf[k - 1];
            let frac = if seg > 0.0 {
                (target - cdf[k - 1]) / seg
            } else {
                0.0
            };
            *x = grid.point(k - 1) + frac * grid.dx();
        }
        Ok(ens)
    }

    fn assemble(positions: Vec<f64>, key: RngStream) -> Self {
        let streams = (0..positions.len())
            .map(|i| key.substream(i as u64).rng())
            .collect();
        Ensemble {
            positions,
            time: 0.0,
            key,
            streams,
            boundary_events: 0,
        }
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn n_particles(&self) -> usize {
        self.positions.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn rng_key(&self) -> RngStream {
        self.key
    }

    /// Number of steps on which a particle left the box and was reflected
    /// (clamped grids) or wrapped (periodic grids).
    pub fn boundary_events(&self) -> u64 {
        self.boundary_events
    }

    pub fn mean(&self) -> f64 {
        if self.positions.is_empty() {
            return f64::NAN;
        }
        self.positions.iter().sum::<f64>() / self.positions.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let n = self.positions.len();
        if n < 2 {
            return f64::NAN;
        }
        let m = self.mean();
        self.positions
            .iter()
            .map(|x| (x - m) * (x - m))
            .sum::<f64>()
            / (n - 1) as f64
    }

    /// One Euler-Maruyama step of dX = (v + u) dt + sigma sqrt(dt) N(0,1).
    pub fn forward_step(&mut self, drift: &DriftSpec, dt: f64) -> Result<()> {
        self.step(drift, dt, 1.0)?;
        self.time += dt;
        Ok(())
    }

    /// One step of the time-reversed process, dX = (v - u) dt + sigma sqrt(dt) N(0,1),
    /// run forward in computer time with independent noise draws; the
    /// ensemble clock runs backward.
    pub fn backward_step(&mut self, drift: &DriftSpec, dt: f64) -> Result<()> {
        self.step(drift, dt, -1.0)?;
        self.time -= dt;
        Ok(())
    }

    fn step(&mut self, drift: &DriftSpec, dt: f64, u_sign: f64) -> Result<()> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!("step needs dt > 0, got {dt}")));
        }
        let grid = drift.grid();
        let (lo, hi) = (grid.x_min(), grid.x_max());
        let span = hi - lo;
        let noise = drift.sigma() * dt.sqrt();
        let mut exits = 0u64;
        for (x, rng) in self.positions.iter_mut().zip(self.streams.iter_mut()) {
            let (v, u) = drift.velocities_at(*x);
            let b = v + u_sign * u;
            let xi: f64 = StandardNormal.sample(rng);
            let mut next = *x + b * dt + noise * xi;
            if next < lo || next > hi {
                exits += 1;
                next = match grid.boundary() {
                    Boundary::Periodic => lo + (next - lo).rem_euclid(span),
                    Boundary::Clamped => {
                        // Fold into [lo, hi] as a triangle wave: one pass
                        // handles arbitrarily large excursions.
                        let y = (next - lo).rem_euclid(2.0 * span);
                        lo + if y <= span { y } else { 2.0 * span - y }
                    }
                };
            }
            if !next.is_finite() {
                return Err(Error::Numeric(format!(
                    "particle position became {next} (drift b={b}, dt={dt})"
                )));
            }
            *x = next;
        }
        self.boundary_events += exits;
        Ok(())
    }
}
