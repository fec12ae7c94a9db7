//! Nonlinear Fourier transform of two-component signals under the Manakov
//! Lax operator (continuous spectrum only).
//!
//! Forward transforms use the Ablowitz-Ladik discretization; the inverse is
//! discrete layer peeling on the polynomial (coefficient) representation of
//! the scattering data.

mod forward;
mod inverse;

pub use forward::{forward_nft, forward_nft_direct, forward_nft_scalar, scattering_at};
pub use inverse::{
    inverse_nft, inverse_nft_exact, inverse_nft_with_floor, phase_from_log_modulus,
    spectrum_to_scattering,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;

/// Smallest |a(λ)| accepted when dividing by `a` or peeling layers.
pub const DEFAULT_A_FLOOR: f64 = 1e-12;

/// Sign `s` of the nonlinearity in `j q_z = q_tt − 2s|q|²q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `s = -1`, anomalous dispersion.
    Focusing,
    /// `s = +1`, normal dispersion.
    Defocusing,
}

impl Regime {
    pub fn sign(self) -> f64 {
        match self {
            Regime::Focusing => -1.0,
            Regime::Defocusing => 1.0,
        }
    }
}

/// Nonlinear Fourier coefficients `a(λ)`, `b₁(λ)`, `b₂(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub a: Vec<Complex64>,
    pub b1: Vec<Complex64>,
    pub b2: Vec<Complex64>,
    pub grid: SpectralGrid,
}

/// Reflection coefficients `q̂ᵢ = bᵢ/a` on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSpectrum {
    pub qhat1: Vec<Complex64>,
    pub qhat2: Vec<Complex64>,
    pub grid: SpectralGrid,
}

impl ContinuousSpectrum {
    pub fn zeros(grid: SpectralGrid) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.n_samples];
        Self {
            qhat1: z.clone(),
            qhat2: z,
            grid,
        }
    }

    pub fn from_fn(grid: SpectralGrid, mut f: impl FnMut(f64) -> (Complex64, Complex64)) -> Self {
        let (qhat1, qhat2) = (0..grid.n_samples).map(|k| f(grid.lambda(k))).unzip();
        Self { qhat1, qhat2, grid }
    }

    /// `max_λ |q̂₁|² + |q̂₂|²`.
    pub fn peak_power(&self) -> f64 {
        self.qhat1
            .iter()
            .zip(&self.qhat2)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .fold(0.0, f64::max)
    }

    /// Relative L² distance to `other` over both components.
    pub fn relative_error(&self, other: &ContinuousSpectrum) -> f64 {
        crate::signal::relative_l2(&[&self.qhat1, &self.qhat2], &[&other.qhat1, &other.qhat2])
    }
}

/// `q̂ᵢ = bᵢ/a` with the default floor on |a|.
pub fn scattering_to_spectrum(sd: &ScatteringData) -> Result<ContinuousSpectrum> {
    scattering_to_spectrum_with_floor(sd, DEFAULT_A_FLOOR)
}

pub fn scattering_to_spectrum_with_floor(
    sd: &ScatteringData,
    floor: f64,
) -> Result<ContinuousSpectrum> {
    let n = sd.a.len();
    let mut qhat1 = Vec::with_capacity(n);
    let mut qhat2 = Vec::with_capacity(n);
    for (k, ((a, b1), b2)) in sd.a.iter().zip(&sd.b1).zip(&sd.b2).enumerate() {
        let magnitude = a.norm();
        if !(magnitude > floor) {
            return Err(Error::NearZeroDenominator {
                lambda_index: k,
                magnitude,
            });
        }
        qhat1.push(b1 / a);
        qhat2.push(b2 / a);
    }
    Ok(ContinuousSpectrum {
        qhat1,
        qhat2,
        grid: sd.grid,
    })
}

/// Applies the channel filter `q̂ᵢ(λ) ← q̂ᵢ(λ)·exp(4jsλ²L)`.
///
/// A negative `distance` undoes propagation over `|distance|`.
pub fn propagate_spectrum(
    cs: &ContinuousSpectrum,
    distance: f64,
    regime: Regime,
) -> ContinuousSpectrum {
    let s = regime.sign();
    let filter: Vec<Complex64> = (0..cs.grid.n_samples)
        .map(|k| {
            let l = cs.grid.lambda(k);
            Complex64::from_polar(1.0, 4.0 * s * l * l * distance)
        })
        .collect();
    ContinuousSpectrum {
        qhat1: cs.qhat1.iter().zip(&filter).map(|(q, h)| q * h).collect(),
        qhat2: cs.qhat2.iter().zip(&filter).map(|(q, h)| q * h).collect(),
        grid: cs.grid,
    }
}

/// `max_λ | |a|² + |b₁|² + |b₂|² − 1 |`.
pub fn unimodularity_residual(sd: &ScatteringData) -> f64 {
    sd.a.iter()
        .zip(&sd.b1)
        .zip(&sd.b2)
        .map(|((a, b1), b2)| (a.norm_sqr() + b1.norm_sqr() + b2.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max)
}
