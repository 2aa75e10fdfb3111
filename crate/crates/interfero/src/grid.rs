//! Uniform spatial grids and sampled complex fields.
//!
//! All downstream energy bookkeeping is discrete: inner products and norms
//! carry the quadrature weight Δx (Δx·Δy in 2D), so a field with unit
//! discrete L2 norm has unit energy in the rectangle-rule sense.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniformly spaced 1D grid over `[x_min, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    dx: f64,
}

impl Grid {
    /// `count` uniformly spaced points spanning `[x_min, x_max]` inclusive.
    pub fn new(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Grid(format!("need >= 2 points, got {count}")));
        }
        if !(x_max > x_min) {
            return Err(Error::Grid(format!("empty extent [{x_min}, {x_max}]")));
        }
        let dx = (x_max - x_min) / (count - 1) as f64;
        let points = (0..count).map(|i| x_min + dx * i as f64).collect();
        Ok(Self { points, dx })
    }

    /// Default working grid for 1D Hermite-Gaussian experiments:
    /// 1024 points over [−12σ, 12σ], adequate through mode order 64.
    pub fn default_1d(sigma: f64) -> Self {
        Self::new(-12.0 * sigma, 12.0 * sigma, 1024).expect("static parameters are valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.points[0], *self.points.last().unwrap())
    }
}

/// Tensor-product 2D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    pub x: Grid,
    pub y: Grid,
}

impl Grid2 {
    pub fn new(x: Grid, y: Grid) -> Self {
        Self { x, y }
    }

    /// Default 2D grid: 256×256 over [−10σ, 10σ]².
    pub fn default_2d(sigma: f64) -> Self {
        let g = Grid::new(-10.0 * sigma, 10.0 * sigma, 256).expect("static parameters are valid");
        Self { x: g.clone(), y: g }
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty() || self.y.is_empty()
    }

    pub fn weight(&self) -> f64 {
        self.x.dx() * self.y.dx()
    }
}

/// Complex amplitude samples over a 1D grid.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "field has {} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Discrete L2 norm with the Δx quadrature weight.
    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Discrete energy Δx·Σ|ψ_i|².
    pub fn energy(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Δx-weighted inner product ⟨self, other⟩ = Δx·Σ conj(self_i)·other_i.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch(
                "inner product across different grids".into(),
            ));
        }
        Ok(self.grid.dx()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>())
    }

    pub fn scale(&mut self, s: Complex64) {
        for v in &mut self.values {
            *v *= s;
        }
    }
}

/// Complex amplitude samples over a 2D grid, row-major in (x, y):
/// index = ix * ny + iy.
#[derive(Debug, Clone)]
pub struct Field2 {
    pub grid: Grid2,
    pub values: Vec<Complex64>,
}

impl Field2 {
    pub fn new(grid: Grid2, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "2D field has {} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn energy(&self) -> f64 {
        self.grid.weight() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn inner(&self, other: &Field2) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch(
                "inner product across different grids".into(),
            ));
        }
        Ok(self.grid.weight()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>())
    }
}
