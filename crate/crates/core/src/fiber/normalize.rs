use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FiberParams;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::signal::DualPolSignal;

/// Optical field in √W on a time grid in seconds, at fiber position `position` (m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub a1: Vec<Complex64>,
    pub a2: Vec<Complex64>,
    pub grid: TimeGrid,
    pub position: f64,
}

impl FieldState {
    pub fn new(a1: Vec<Complex64>, a2: Vec<Complex64>, grid: TimeGrid) -> Result<Self> {
        for a in [&a1, &a2] {
            if a.len() != grid.n_samples {
                return Err(Error::LengthMismatch {
                    expected: grid.n_samples,
                    actual: a.len(),
                });
            }
        }
        Ok(Self {
            a1,
            a2,
            grid,
            position: 0.0,
        })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.n_samples];
        Self {
            a1: z.clone(),
            a2: z,
            grid,
            position: 0.0,
        }
    }

    /// Mean total power `⟨|A₁|² + |A₂|²⟩` in W.
    pub fn power(&self) -> f64 {
        self.a1
            .iter()
            .chain(&self.a2)
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            / self.grid.n_samples as f64
    }

    /// `∫ |A₁|² + |A₂|² dT` in J.
    pub fn energy(&self) -> f64 {
        self.power() * self.grid.duration()
    }

    pub fn is_finite(&self) -> bool {
        self.a1
            .iter()
            .chain(&self.a2)
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            a1: self.a1.iter().map(|x| x * factor).collect(),
            a2: self.a2.iter().map(|x| x * factor).collect(),
            grid: self.grid,
            position: self.position,
        }
    }

    /// Applies a constant 2×2 Jones matrix samplewise.
    pub fn rotated(&self, m: [[Complex64; 2]; 2]) -> Self {
        let (a1, a2) = self
            .a1
            .iter()
            .zip(&self.a2)
            .map(|(&x, &y)| (m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y))
            .unzip();
        Self {
            a1,
            a2,
            grid: self.grid,
            position: self.position,
        }
    }
}

/// Scales mapping physical units onto the normalized Manakov equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationScales {
    /// s
    pub t0: f64,
    /// √W
    pub a0: f64,
    /// m
    pub z0: f64,
}

impl NormalizationScales {
    /// `t0 = √(|β₂|·z0/2)`, `a0 = √(2/((8/9)·γ·z0))`.
    pub fn new(beta2: f64, gamma: f64, z0: f64) -> Result<Self> {
        if beta2 == 0.0 || !beta2.is_finite() {
            return Err(Error::Config(
                "normalization needs nonzero dispersion".into(),
            ));
        }
        if !(gamma > 0.0) {
            return Err(Error::Config(
                "normalization needs positive nonlinearity".into(),
            ));
        }
        if !(z0 > 0.0) {
            return Err(Error::Config(
                "normalization length must be positive".into(),
            ));
        }
        Ok(Self {
            t0: (beta2.abs() * z0 / 2.0).sqrt(),
            a0: (2.0 / (8.0 / 9.0 * gamma * z0)).sqrt(),
            z0,
        })
    }

    /// Physical length → normalized distance.
    pub fn distance(&self, meters: f64) -> f64 {
        meters / self.z0
    }
}

/// Path-averaged nonlinearity `γ(1 − e^{−αL})/(αL)` of a lossy span.
pub fn gamma_eff(gamma: f64, alpha: f64, span_length: f64) -> f64 {
    let x = alpha * span_length;
    if x.abs() < 1e-8 {
        // series of (1 − e^{−x})/x
        gamma * (1.0 - x / 2.0 + x * x / 6.0)
    } else {
        gamma * (-(-x).exp_m1()) / x
    }
}

/// Scales with `z0` equal to one span; `use_gamma_eff` switches to the
/// path-averaged nonlinearity of a lossy span.
pub fn normalization_scales(
    params: &FiberParams,
    use_gamma_eff: bool,
) -> Result<NormalizationScales> {
    let gamma = if use_gamma_eff {
        gamma_eff(params.gamma, params.alpha, params.span_length)
    } else {
        params.gamma
    };
    NormalizationScales::new(params.beta2, gamma, params.span_length)
}

pub fn normalize(field: &FieldState, scales: &NormalizationScales) -> DualPolSignal {
    let inv = 1.0 / scales.a0;
    DualPolSignal {
        q1: field.a1.iter().map(|x| x * inv).collect(),
        q2: field.a2.iter().map(|x| x * inv).collect(),
        grid: TimeGrid {
            t_start: field.grid.t_start / scales.t0,
            n_samples: field.grid.n_samples,
            dt: field.grid.dt / scales.t0,
        },
    }
}

pub fn denormalize(signal: &DualPolSignal, scales: &NormalizationScales) -> FieldState {
    FieldState {
        a1: signal.q1.iter().map(|x| x * scales.a0).collect(),
        a2: signal.q2.iter().map(|x| x * scales.a0).collect(),
        grid: TimeGrid {
            t_start: signal.grid.t_start * scales.t0,
            n_samples: signal.grid.n_samples,
            dt: signal.grid.dt * scales.t0,
        },
        position: 0.0,
    }
}
