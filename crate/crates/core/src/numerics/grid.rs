use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How stencils treat the edges of the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// Indices wrap around; the grid covers [x_min, x_max) with x_max == x_min.
    Periodic,
    /// One-sided stencils at the edges; fields are assumed to vanish outside.
    Clamped,
}

/// Uniform 1D grid. Points sit at x_min + i*dx for i in 0..n_points with
/// dx = (x_max - x_min)/n_points, so x_max itself is not a grid point
/// (the natural convention for periodic boxes, harmless for clamped ones).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    boundary: Boundary,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, boundary: Boundary) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::Domain(format!(
                "grid needs finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 3 {
            return Err(Error::Domain(format!(
                "grid needs at least 3 points, got {n_points}"
            )));
        }
        Ok(Grid1D {
            x_min,
            x_max,
            n_points,
            boundary,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.point(i))
    }

    /// Index of the cell containing x, clamped to the valid range.
    pub fn cell_index(&self, x: f64) -> usize {
        let raw = ((x - self.x_min) / self.dx()).floor();
        (raw.max(0.0) as usize).min(self.n_points - 1)
    }

    /// Angular wavenumbers in FFT order: k_j = 2*pi*j/L for j = 0..n/2,
    /// then the negative branch.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let l = self.x_max - self.x_min;
        let base = 2.0 * std::f64::consts::PI / l;
        (0..n)
            .map(|j| {
                let j = j as i64;
                let half = (n / 2) as i64;
                let signed = if j <= half { j } else { j - n as i64 };
                base * signed as f64
            })
            .collect()
    }
}

/// A complex-valued function sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "field has {} values on a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        ComplexField { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// integral |psi|^2 dx by the rectangle rule.
    pub fn integrate_density(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Scale so that integral |psi|^2 dx = 1.
    pub fn normalize(&mut self) -> Result<()> {
        let total = self.integrate_density();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::DegenerateState(format!(
                "cannot normalize field with |psi|^2 integral {total}"
            )));
        }
        let scale = 1.0 / total.sqrt();
        for v in &mut self.values {
            *v *= scale;
        }
        Ok(())
    }
}
