use num_complex::Complex64;

use super::equalizer::{apply_equalizer, EqualizerTaps};
use super::udomain::{
    linear_spectrum_inverse, pseudo_to_frame, qhat_to_u_with, u_encode, u_to_qhat_with, UMap,
};
use super::{BurstConfig, SymbolFrame};
use crate::error::{Error, Result};
use crate::fiber::{FieldState, NormalizationScales};
use crate::grid::TimeGrid;
use crate::nft::{
    forward_nft, inverse_nft_exact, propagate_spectrum, scattering_to_spectrum, Regime,
};
use crate::signal::DualPolSignal;

/// What both ends of an NFDM link agree on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NfdmLink {
    pub scales: NormalizationScales,
    /// Total launch power, W: the mean power within the burst of the
    /// linear-domain waveform, summed over polarizations.
    pub launch_power: f64,
    /// Distance undone by the channel filter at the receiver, m.
    pub distance: f64,
    /// Received `|q̂ᵢ|` values above this radius are pulled back onto it
    /// before the bounded U-domain map, which is undefined from 1 upwards.
    pub rx_saturation: f64,
    pub u_map: UMap,
}

impl NfdmLink {
    pub const DEFAULT_SATURATION: f64 = 0.95;

    pub fn new(scales: NormalizationScales, launch_power: f64, distance: f64) -> Self {
        Self {
            scales,
            launch_power,
            distance,
            rx_saturation: Self::DEFAULT_SATURATION,
            u_map: UMap::Bounded,
        }
    }

    /// Normalized amplitude of the unit-power burst per polarization.
    pub fn amplitude(&self, config: &BurstConfig) -> f64 {
        (self.launch_power / config.n_polarizations as f64).sqrt() / self.scales.a0
    }

    pub fn nft_grid(&self, config: &BurstConfig) -> Result<TimeGrid> {
        let g = config.nft_grid()?;
        TimeGrid::new(
            g.t_start / self.scales.t0,
            g.n_samples,
            g.dt / self.scales.t0,
        )
    }
}

fn slot_offset(config: &BurstConfig) -> usize {
    (config.nft_samples() - config.symbol_samples()) / 2
}

/// U-domain multiplexing, the map onto the continuous spectrum, a joint
/// inverse NFT, and denormalization to one physical symbol slot.
pub fn nfdm_modulate(
    frame: &SymbolFrame,
    config: &BurstConfig,
    link: &NfdmLink,
) -> Result<FieldState> {
    config.validate()?;
    if !(link.launch_power >= 0.0) {
        return Err(Error::NonPositivePower(link.launch_power));
    }
    let grid = link.nft_grid(config)?;
    let u = u_encode(frame, config, &grid, link.amplitude(config))?;
    let q = inverse_nft_exact(&u_to_qhat_with(&u, link.u_map), &grid)?;
    let r = slot_offset(config)..slot_offset(config) + config.symbol_samples();
    let a0 = link.scales.a0;
    FieldState::new(
        q.q1[r.clone()].iter().map(|x| x * a0).collect(),
        q.q2[r].iter().map(|x| x * a0).collect(),
        config.symbol_grid()?,
    )
}

fn saturate(q: &mut [Complex64], radius: f64) {
    for x in q.iter_mut() {
        let m = x.norm();
        if m > radius {
            *x *= radius / m;
        }
    }
}

/// Receiver front half: forward NFT of the zero-padded slot, the inverse
/// channel filter over `link.distance`, and the map back to the U domain,
/// returned as linear-domain waveforms on the NFT window.
pub fn nfdm_rx_pseudo(
    field: &FieldState,
    config: &BurstConfig,
    link: &NfdmLink,
) -> Result<[Vec<Complex64>; 2]> {
    let n = config.symbol_samples();
    if field.a1.len() != n || field.a2.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: field.a1.len(),
        });
    }
    let grid = link.nft_grid(config)?;
    let off = slot_offset(config);
    let inv = 1.0 / link.scales.a0;
    let mut q1 = vec![Complex64::new(0.0, 0.0); grid.n_samples];
    let mut q2 = q1.clone();
    for k in 0..n {
        q1[off + k] = field.a1[k] * inv;
        q2[off + k] = field.a2[k] * inv;
    }
    let signal = DualPolSignal::new(q1, q2, grid)?;
    let cs = scattering_to_spectrum(&forward_nft(&signal)?)?;
    let mut cs = propagate_spectrum(&cs, -link.scales.distance(link.distance), Regime::Focusing);
    if link.u_map == UMap::Bounded {
        saturate(&mut cs.qhat1, link.rx_saturation);
        saturate(&mut cs.qhat2, link.rx_saturation);
    }
    let u = qhat_to_u_with(&cs, link.u_map)?;
    Ok([
        linear_spectrum_inverse(&u.u1, &grid)?,
        linear_spectrum_inverse(&u.u2, &grid)?,
    ])
}

/// Full receiver, with an optional MIMO equalizer on the U-domain waveform.
pub fn nfdm_demodulate(
    field: &FieldState,
    config: &BurstConfig,
    link: &NfdmLink,
    equalizer: Option<&EqualizerTaps>,
) -> Result<SymbolFrame> {
    let x = nfdm_rx_pseudo(field, config, link)?;
    let x = match equalizer {
        Some(t) => apply_equalizer(t, [&x[0], &x[1]]),
        None => x,
    };
    pseudo_to_frame([&x[0], &x[1]], config, link.amplitude(config))
}
