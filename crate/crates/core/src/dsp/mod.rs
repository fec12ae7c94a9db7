//! Transmitter and receiver DSP for burst-mode NFDM and OFDM.

mod equalizer;
mod framing;
mod nfdm;
mod ofdm;
mod qam;
mod udomain;

pub use crate::fiber::dbp;
pub use equalizer::{apply_equalizer, train_equalizer, EqualizerTaps};
pub use framing::{estimate_guard, frame_bursts, split_bursts, GuardEstimate};
pub use nfdm::{nfdm_demodulate, nfdm_modulate, nfdm_rx_pseudo, NfdmLink};
pub use ofdm::{
    burst_symbols, burst_waveform, cd_compensate, lowpass, ofdm_demodulate, ofdm_modulate,
};
pub use qam::{demap_frame, map_bits, Modulation};
pub use udomain::{
    linear_spectrum, linear_spectrum_inverse, nfdm_tx_pseudo, pseudo_burst_range, pseudo_to_frame,
    qhat_to_u, qhat_to_u_with, u_decode, u_encode, u_to_qhat, u_to_qhat_with, UMap, USpectrum,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Burst layout shared by the OFDM and NFDM chains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstConfig {
    pub n_subcarriers: usize,
    /// Burst duration `T₀`, s. Also the inverse subcarrier spacing.
    pub burst_duration: f64,
    pub guard_duration: f64,
    /// Samples per subcarrier; the sample rate is `n_subcarriers·oversampling/T₀`.
    pub oversampling: usize,
    /// NFT window length in symbol durations.
    pub inft_guard_factor: usize,
    pub modulation: Modulation,
    /// 1 or 2.
    pub n_polarizations: usize,
}

impl Default for BurstConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 112,
            burst_duration: 2e-9,
            guard_duration: 18e-9,
            oversampling: 4,
            inft_guard_factor: 2,
            modulation: Modulation::Qam16,
            n_polarizations: 2,
        }
    }
}

impl BurstConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.n_subcarriers == 0 {
            return bad("n_subcarriers must be positive");
        }
        if !(self.burst_duration > 0.0 && self.burst_duration.is_finite()) {
            return bad("burst duration must be positive");
        }
        if !(self.guard_duration >= 0.0 && self.guard_duration.is_finite()) {
            return bad("guard duration must be non-negative");
        }
        if self.oversampling == 0 || self.inft_guard_factor == 0 {
            return bad("oversampling and inft_guard_factor must be at least 1");
        }
        if !(1..=2).contains(&self.n_polarizations) {
            return bad("n_polarizations must be 1 or 2");
        }
        let ratio = self.symbol_duration() / self.burst_duration * self.burst_samples() as f64;
        if (ratio - ratio.round()).abs() > 1e-6 {
            return bad("symbol duration must be a whole number of samples");
        }
        Ok(())
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    pub fn bits_per_frame(&self) -> usize {
        self.n_polarizations * self.n_subcarriers * self.bits_per_symbol()
    }

    /// `T = T₀ + T_guard`.
    pub fn symbol_duration(&self) -> f64 {
        self.burst_duration + self.guard_duration
    }

    pub fn dt(&self) -> f64 {
        self.burst_duration / self.burst_samples() as f64
    }

    pub fn burst_samples(&self) -> usize {
        self.n_subcarriers * self.oversampling
    }

    pub fn symbol_samples(&self) -> usize {
        (self.symbol_duration() / self.dt()).round() as usize
    }

    pub fn nft_samples(&self) -> usize {
        self.symbol_samples() * self.inft_guard_factor
    }

    /// Index of the first burst sample within a symbol slot.
    pub fn burst_offset(&self) -> usize {
        (self.symbol_samples() - self.burst_samples()) / 2
    }

    /// Physical grid of one symbol slot, centered on zero.
    pub fn symbol_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(
            -(self.symbol_samples() as f64) * self.dt() / 2.0,
            self.symbol_samples(),
            self.dt(),
        )
    }

    /// Physical grid of the NFT window, centered on zero.
    pub fn nft_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(
            -(self.nft_samples() as f64) * self.dt() / 2.0,
            self.nft_samples(),
            self.dt(),
        )
    }

    pub fn baud_rate(&self) -> f64 {
        self.n_subcarriers as f64 / self.burst_duration
    }

    /// Bit rate within the burst, per polarization.
    pub fn burst_bit_rate(&self) -> f64 {
        self.baud_rate() * self.bits_per_symbol() as f64
    }

    /// Net rate including the guard interval and all polarizations.
    pub fn effective_bit_rate(&self) -> f64 {
        self.bits_per_frame() as f64 / self.symbol_duration()
    }

    /// Signal bandwidth `n_subcarriers/T₀`.
    pub fn bandwidth(&self) -> f64 {
        self.baud_rate()
    }
}

/// One burst worth of subcarrier symbols per polarization. On the RX side
/// `bits` is empty until [`demap_frame`] is called.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub symbols: [Vec<Complex64>; 2],
    pub bits: Vec<u8>,
}

impl SymbolFrame {
    pub fn zeros(config: &BurstConfig) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); config.n_subcarriers];
        Self {
            symbols: [z.clone(), z],
            bits: Vec::new(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            symbols: [
                self.symbols[0].iter().map(|x| x * c).collect(),
                self.symbols[1].iter().map(|x| x * c).collect(),
            ],
            bits: self.bits.clone(),
        }
    }
}
