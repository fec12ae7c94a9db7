use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `10·log10(e)`: dB per neper of power.
const DB_PER_NEPER: f64 = 4.342_944_819_032_518;

/// Fiber, amplifier and PMD parameters of a multi-span link, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberParams {
    /// Power attenuation coefficient, Np/m.
    pub alpha: f64,
    /// Group-velocity dispersion, s²/m (negative is anomalous).
    pub beta2: f64,
    /// Kerr coefficient, 1/(W·m).
    pub gamma: f64,
    /// m
    pub span_length: f64,
    pub n_spans: usize,
    /// PMD parameter, s/√m.
    pub pmd_coeff: f64,
    /// Coarse-step PMD section length, m.
    pub section_length: f64,
    pub noise_figure_db: f64,
    /// Optical carrier frequency, Hz.
    pub center_frequency: f64,
}

impl Default for FiberParams {
    /// Standard single-mode fiber, 25 × 80 km, no PMD.
    fn default() -> Self {
        Self {
            alpha: Self::alpha_from_db_per_km(0.2),
            beta2: -21.5e-27,
            gamma: 1.3e-3,
            span_length: 80e3,
            n_spans: 25,
            pmd_coeff: 0.0,
            section_length: 1e3,
            noise_figure_db: 6.2,
            center_frequency: 193.55e12,
        }
    }
}

impl FiberParams {
    pub fn alpha_from_db_per_km(db_per_km: f64) -> f64 {
        db_per_km / DB_PER_NEPER / 1e3
    }

    pub fn alpha_db_per_km(&self) -> f64 {
        self.alpha * DB_PER_NEPER * 1e3
    }

    /// ps/√km → s/√m
    pub fn pmd_from_ps_per_sqrt_km(d: f64) -> f64 {
        d * 1e-12 / 1e3f64.sqrt()
    }

    pub fn pmd_ps_per_sqrt_km(&self) -> f64 {
        self.pmd_coeff * 1e12 * 1e3f64.sqrt()
    }

    pub fn total_length(&self) -> f64 {
        self.span_length * self.n_spans as f64
    }

    /// Power gain that exactly offsets one span of loss.
    pub fn span_gain(&self) -> f64 {
        (self.alpha * self.span_length).exp()
    }

    pub fn span_loss_db(&self) -> f64 {
        self.alpha * self.span_length * DB_PER_NEPER
    }

    pub fn n_sections(&self) -> usize {
        (self.total_length() / self.section_length - 1e-9)
            .ceil()
            .max(0.0) as usize
    }

    pub fn lossless(mut self) -> Self {
        self.alpha = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(self.span_length > 0.0) {
            return fail(format!(
                "span_length must be positive, got {}",
                self.span_length
            ));
        }
        if !(self.section_length > 0.0 && self.section_length <= self.span_length) {
            return fail(format!(
                "section_length must lie in (0, span_length], got {}",
                self.section_length
            ));
        }
        if !(self.pmd_coeff >= 0.0) {
            return fail(format!(
                "pmd_coeff must be non-negative, got {}",
                self.pmd_coeff
            ));
        }
        if !(self.alpha >= 0.0) {
            return fail(format!("alpha must be non-negative, got {}", self.alpha));
        }
        if !(self.beta2.is_finite() && self.gamma.is_finite() && self.gamma >= 0.0) {
            return fail("beta2 must be finite and gamma non-negative".into());
        }
        if !(self.center_frequency > 0.0) {
            return fail("center_frequency must be positive".into());
        }
        Ok(())
    }
}
