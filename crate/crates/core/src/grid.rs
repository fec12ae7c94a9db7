//! Uniform time and nonlinear-frequency grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform sampling `t[k] = t_start + k·dt`, `k = 0..n_samples`.
///
/// Units are whatever the owner uses: normalized time for NFT signals,
/// seconds for physical fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub n_samples: usize,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(t_start: f64, n_samples: usize, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!(
                "time step must be positive, got {dt}"
            )));
        }
        if n_samples < 2 {
            return Err(Error::Config(format!(
                "need at least 2 samples, got {n_samples}"
            )));
        }
        if !t_start.is_finite() {
            return Err(Error::Config("t_start must be finite".into()));
        }
        Ok(Self {
            t_start,
            n_samples,
            dt,
        })
    }

    /// Grid of `n_samples` points covering `[-window/2, window/2)`.
    pub fn centered(window: f64, n_samples: usize) -> Result<Self> {
        Self::new(-window / 2.0, n_samples, window / n_samples as f64)
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt
    }

    /// End of the window, `t_start + N·dt`.
    pub fn t_end(&self) -> f64 {
        self.t(self.n_samples)
    }

    pub fn duration(&self) -> f64 {
        self.n_samples as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.t(k)).collect()
    }

    /// The spectral grid paired with this time grid.
    pub fn spectral(&self) -> SpectralGrid {
        SpectralGrid::for_time_grid(self)
    }
}

/// Nonlinear-frequency grid `λ[k] = lambda_min + k·d_lambda` on
/// `[-π/(2dt), π/(2dt))` with as many points as the paired time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub n_samples: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub d_lambda: f64,
}

impl SpectralGrid {
    pub fn for_time_grid(grid: &TimeGrid) -> Self {
        let lambda_max = PI / (2.0 * grid.dt);
        let lambda_min = -lambda_max;
        Self {
            n_samples: grid.n_samples,
            lambda_min,
            lambda_max,
            d_lambda: (lambda_max - lambda_min) / grid.n_samples as f64,
        }
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.lambda_min + k as f64 * self.d_lambda
    }

    pub fn lambdas(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.lambda(k)).collect()
    }

    /// Whether this grid is the canonical pairing of `grid`.
    pub fn is_paired_with(&self, grid: &TimeGrid) -> bool {
        let other = grid.spectral();
        self.n_samples == other.n_samples
            && (self.lambda_min - other.lambda_min).abs() <= 1e-12 * other.lambda_max.abs()
            && (self.d_lambda - other.d_lambda).abs() <= 1e-12 * other.d_lambda.abs()
    }
}
