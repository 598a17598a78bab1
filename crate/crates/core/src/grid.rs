use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[origin, origin + length)` with `n_points` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    origin: f64,
    length: f64,
    n_points: usize,
}

impl SpectralGrid {
    /// Grid centred on zero: `[-length/2, length/2)`.
    pub fn new(length: f64, n_points: usize) -> Result<Self> {
        Self::with_origin(-0.5 * length, length, n_points)
    }

    pub fn with_origin(origin: f64, length: f64, n_points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidGrid(format!("origin must be finite, got {origin}")));
        }
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 2, got {n_points}"
            )));
        }
        Ok(Self {
            origin,
            length,
            n_points,
        })
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn end(&self) -> f64 {
        self.origin + self.length
    }

    pub fn center(&self) -> f64 {
        self.origin + 0.5 * self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Signed mode index of FFT slot `j`; the Nyquist slot maps to `+n/2`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.n_points as i64;
        let j = j as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * self.mode(j) as f64 / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.wavenumber(j)).collect()
    }

    pub fn nyquist(&self) -> usize {
        self.n_points / 2
    }

    pub fn k_max(&self) -> f64 {
        PI * self.n_points as f64 / self.length
    }

    /// Closed containment test `origin <= x <= origin + length`.
    pub fn contains(&self, x: f64) -> bool {
        x >= self.origin && x <= self.end()
    }

    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x - self.origin) / self.spacing()).round();
        (j.max(0.0) as usize).min(self.n_points - 1)
    }

    /// Same spacing and size, translated.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            origin: self.origin + delta,
            ..*self
        }
    }
}
