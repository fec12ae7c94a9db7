use num_complex::Complex64;

use crate::dsp::{BurstConfig, SymbolFrame};
use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::fiber::FieldState;

const EVM_FLOOR_DB: f64 = -100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvmMode {
    /// Error against the received symbols as they are.
    Absolute,
    /// Received symbols first rescaled by the least-squares complex gain.
    ScaleInvariant,
}

/// RMS error vector over RMS reference, in dB, floored at −100 dB.
pub fn evm(tx: &[Complex64], rx: &[Complex64], mode: EvmMode) -> Result<f64> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            expected: tx.len(),
            actual: rx.len(),
        });
    }
    let reference: f64 = tx.iter().map(|x| x.norm_sqr()).sum();
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    let gain = match mode {
        EvmMode::Absolute => Complex64::new(1.0, 0.0),
        EvmMode::ScaleInvariant => {
            let rr: f64 = rx.iter().map(|x| x.norm_sqr()).sum();
            if rr == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                tx.iter()
                    .zip(rx)
                    .map(|(t, r)| t * r.conj())
                    .sum::<Complex64>()
                    / rr
            }
        }
    };
    let err: f64 = tx
        .iter()
        .zip(rx)
        .map(|(t, r)| (t - r * gain).norm_sqr())
        .sum();
    if err == 0.0 {
        return Ok(EVM_FLOOR_DB);
    }
    Ok((10.0 * (err / reference).log10()).max(EVM_FLOOR_DB))
}

/// EVM over the active polarizations of matched frames.
pub fn evm_frames(
    tx: &[SymbolFrame],
    rx: &[SymbolFrame],
    config: &BurstConfig,
    mode: EvmMode,
) -> Result<f64> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            expected: tx.len(),
            actual: rx.len(),
        });
    }
    let collect = |fs: &[SymbolFrame]| -> Vec<Complex64> {
        fs.iter()
            .flat_map(|f| {
                f.symbols[..config.n_polarizations]
                    .iter()
                    .flatten()
                    .copied()
            })
            .collect()
    };
    evm(&collect(tx), &collect(rx), mode)
}

/// OSNR in `reference_bandwidth`, dB. The noise density (both
/// polarizations) is read from the spectrum between the midpoint of band
/// edge and Nyquist and the Nyquist frequency itself, and subtracted from
/// the total power to get the signal power.
pub fn osnr(field: &FieldState, signal_bandwidth: f64, reference_bandwidth: f64) -> Result<f64> {
    let n = field.grid.n_samples;
    let dt = field.grid.dt;
    let nyquist = 0.5 / dt;
    let edge = 0.5 * signal_bandwidth;
    if !(edge > 0.0 && edge < nyquist && reference_bandwidth > 0.0) {
        return Err(Error::Config(
            "signal band must lie strictly inside the simulation bandwidth".into(),
        ));
    }
    let lower = 0.5 * (edge + nyquist);
    let fft = Fft::new(n);
    let mut spec = vec![0.0; n];
    for a in [&field.a1, &field.a2] {
        let mut x = a.clone();
        fft.forward(&mut x);
        spec.iter_mut()
            .zip(&x)
            .for_each(|(s, x)| *s += x.norm_sqr() * dt / n as f64);
    }
    let df = 1.0 / (n as f64 * dt);
    let freq = |k: usize| {
        if k <= n / 2 {
            k as f64 * df
        } else {
            (k as f64 - n as f64) * df
        }
    };
    let window: Vec<f64> = (0..n)
        .filter(|&k| freq(k).abs() >= lower)
        .map(|k| spec[k])
        .collect();
    if window.len() < 16 {
        return Err(Error::TooFewSamples {
            needed: 16,
            got: window.len(),
        });
    }
    let noise_psd = window.iter().sum::<f64>() / window.len() as f64;
    let total = field.power();
    let signal = total - noise_psd / dt;
    if !(signal > 0.0) {
        return Err(Error::NonPositivePower(signal));
    }
    Ok(10.0 * (signal / (noise_psd * reference_bandwidth)).log10())
}
