use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;

fn check_len(grid: &SpectralGrid, len: usize) -> Result<()> {
    if len != grid.n_points() {
        return Err(Error::InvalidGrid(format!(
            "{len} samples for a grid of {} points",
            grid.n_points()
        )));
    }
    Ok(())
}

pub(crate) fn check_finite_real(values: &[f64], context: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            context: context.to_string(),
            index,
        }),
        None => Ok(()),
    }
}

pub(crate) fn check_finite_complex(values: &[Complex64], context: &str) -> Result<()> {
    match values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        Some(index) => Err(Error::NonFinite {
            context: context.to_string(),
            index,
        }),
        None => Ok(()),
    }
}

/// Real samples on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: SpectralGrid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: SpectralGrid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        check_finite_real(&values, "real field")?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SpectralGrid) -> Self {
        Self {
            values: vec![0.0; grid.n_points()],
            grid,
        }
    }

    pub fn from_fn(grid: SpectralGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        Self::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &RealField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &RealField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Rectangle-rule integral over one period.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }
}

/// Complex samples obeying `f(x + L) = exp(i twist) f(x)`.
///
/// `twist = 0` is the ordinary periodic case. A nonzero twist lets fields with
/// a net phase jump across the box (dark solitons, data with nonzero total
/// velocity) be treated spectrally without a seam.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: SpectralGrid,
    values: Vec<Complex64>,
    twist: f64,
}

impl ComplexField {
    pub fn new(grid: SpectralGrid, values: Vec<Complex64>) -> Result<Self> {
        Self::with_twist(grid, values, 0.0)
    }

    pub fn with_twist(grid: SpectralGrid, values: Vec<Complex64>, twist: f64) -> Result<Self> {
        check_len(&grid, values.len())?;
        check_finite_complex(&values, "complex field")?;
        if !twist.is_finite() {
            return Err(Error::Precondition(format!("twist must be finite, got {twist}")));
        }
        Ok(Self {
            grid,
            values,
            twist,
        })
    }

    pub fn from_fn(grid: SpectralGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn constant(grid: SpectralGrid, value: Complex64) -> Self {
        Self {
            values: vec![value; grid.n_points()],
            grid,
            twist: 0.0,
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn twist(&self) -> f64 {
        self.twist
    }

    /// Twist per unit length, the shift applied to every wavenumber.
    pub fn bloch_shift(&self) -> f64 {
        self.twist / self.grid.length()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn abs(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.norm()).collect(),
        }
    }

    pub fn re(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.re).collect(),
        }
    }

    pub fn im(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.im).collect(),
        }
    }

    /// `exp(-i q (x - origin))`, the factor mapping samples to the periodic envelope.
    pub(crate) fn untwist_factors(&self) -> Option<Vec<Complex64>> {
        if self.twist == 0.0 {
            return None;
        }
        let q = self.bloch_shift();
        let dx = self.grid.spacing();
        Some(
            (0..self.grid.n_points())
                .map(|j| Complex64::from_polar(1.0, -q * j as f64 * dx))
                .collect(),
        )
    }
}
