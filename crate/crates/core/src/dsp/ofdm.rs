use num_complex::Complex64;

use super::{BurstConfig, SymbolFrame};
use crate::error::{Error, Result};
use crate::fft::{angular_frequencies, Fft};
use crate::fiber::FieldState;

fn bin(k: isize, m: usize) -> usize {
    k.rem_euclid(m as isize) as usize
}

fn subcarrier_indices(config: &BurstConfig) -> impl Iterator<Item = isize> {
    let n = config.n_subcarriers as isize;
    -(n / 2)..n - n / 2
}

/// Zero-padded inverse DFT of one polarization's symbols over the burst.
/// Unit-energy symbols give unit mean power.
pub fn burst_waveform(symbols: &[Complex64], config: &BurstConfig) -> Result<Vec<Complex64>> {
    if symbols.len() != config.n_subcarriers {
        return Err(Error::LengthMismatch {
            expected: config.n_subcarriers,
            actual: symbols.len(),
        });
    }
    let m = config.burst_samples();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, s) in subcarrier_indices(config).zip(symbols) {
        buf[bin(k, m)] = *s;
    }
    Fft::new(m).inverse(&mut buf);
    let norm = 1.0 / (config.n_subcarriers as f64).sqrt();
    buf.iter_mut().for_each(|x| *x *= norm);
    Ok(buf)
}

/// Inverse of [`burst_waveform`].
pub fn burst_symbols(samples: &[Complex64], config: &BurstConfig) -> Result<Vec<Complex64>> {
    let m = config.burst_samples();
    if samples.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: samples.len(),
        });
    }
    let mut buf = samples.to_vec();
    Fft::new(m).forward(&mut buf);
    let norm = (config.n_subcarriers as f64).sqrt() / m as f64;
    Ok(subcarrier_indices(config)
        .map(|k| buf[bin(k, m)] * norm)
        .collect())
}

/// OFDM symbol slot: the burst centered in the guard interval, unit mean
/// power per active polarization within the burst.
pub fn ofdm_modulate(frame: &SymbolFrame, config: &BurstConfig) -> Result<FieldState> {
    config.validate()?;
    let n = config.symbol_samples();
    let off = config.burst_offset();
    let mut pols = [
        vec![Complex64::new(0.0, 0.0); n],
        vec![Complex64::new(0.0, 0.0); n],
    ];
    for (p, out) in pols.iter_mut().enumerate().take(config.n_polarizations) {
        let w = burst_waveform(&frame.symbols[p], config)?;
        out[off..off + w.len()].copy_from_slice(&w);
    }
    let [a1, a2] = pols;
    FieldState::new(a1, a2, config.symbol_grid()?)
}

/// Strips the guard and picks the subcarriers back out.
pub fn ofdm_demodulate(field: &FieldState, config: &BurstConfig) -> Result<SymbolFrame> {
    let n = config.symbol_samples();
    if field.a1.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: field.a1.len(),
        });
    }
    let r = config.burst_offset()..config.burst_offset() + config.burst_samples();
    let mut frame = SymbolFrame::zeros(config);
    for p in 0..config.n_polarizations {
        let a = if p == 0 { &field.a1 } else { &field.a2 };
        frame.symbols[p] = burst_symbols(&a[r.clone()], config)?;
    }
    Ok(frame)
}

/// Undoes the accumulated dispersion `β₂·total_length` with an all-pass
/// phase `exp(jβ₂ω²L/2)`.
pub fn cd_compensate(field: &FieldState, beta2: f64, total_length: f64) -> FieldState {
    let n = field.grid.n_samples;
    let fft = Fft::new(n);
    let h: Vec<Complex64> = angular_frequencies(n, field.grid.dt)
        .iter()
        .map(|w| Complex64::from_polar(1.0, beta2 * w * w * total_length / 2.0))
        .collect();
    let apply = |a: &[Complex64]| {
        let mut x = a.to_vec();
        fft.forward(&mut x);
        x.iter_mut().zip(&h).for_each(|(x, h)| *x *= h);
        fft.inverse_normalized(&mut x);
        x
    };
    FieldState {
        a1: apply(&field.a1),
        a2: apply(&field.a2),
        grid: field.grid,
        position: field.position,
    }
}

/// Ideal receiver low-pass: zeroes every frequency with `|f| > cutoff`.
pub fn lowpass(field: &FieldState, cutoff: f64) -> FieldState {
    let n = field.grid.n_samples;
    let fft = Fft::new(n);
    let wc = 2.0 * std::f64::consts::PI * cutoff;
    let keep: Vec<bool> = angular_frequencies(n, field.grid.dt)
        .iter()
        .map(|w| w.abs() <= wc)
        .collect();
    let apply = |a: &[Complex64]| {
        let mut x = a.to_vec();
        fft.forward(&mut x);
        x.iter_mut()
            .zip(&keep)
            .filter(|(_, k)| !**k)
            .for_each(|(x, _)| *x = Complex64::new(0.0, 0.0));
        fft.inverse_normalized(&mut x);
        x
    };
    FieldState {
        a1: apply(&field.a1),
        a2: apply(&field.a2),
        grid: field.grid,
        position: field.position,
    }
}
