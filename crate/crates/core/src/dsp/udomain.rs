use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ofdm::{burst_symbols, burst_waveform};
use super::{BurstConfig, SymbolFrame};
use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::grid::{SpectralGrid, TimeGrid};
use crate::nft::ContinuousSpectrum;

/// Linear multiplexing domain: pre-image of the continuous spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct USpectrum {
    pub u1: Vec<Complex64>,
    pub u2: Vec<Complex64>,
    pub grid: SpectralGrid,
}

/// Small-amplitude limit of the continuous spectrum,
/// `−Σₖ q̄ₖ·Δt·e^{−2jλ(tₖ+Δt/2)}`, evaluated on the paired λ grid. This is an
/// exact, invertible DFT between the time samples and the λ samples.
pub fn linear_spectrum(x: &[Complex64], grid: &TimeGrid) -> Result<Vec<Complex64>> {
    let n = grid.n_samples;
    if x.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    let sg = grid.spectral();
    let mut y: Vec<Complex64> = x
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { v.conj() } else { -v.conj() })
        .collect();
    Fft::new(n).forward(&mut y);
    let t = grid.t_start + grid.dt / 2.0;
    Ok(y.iter()
        .enumerate()
        .map(|(m, v)| -grid.dt * v * Complex64::from_polar(1.0, -2.0 * sg.lambda(m) * t))
        .collect())
}

pub fn linear_spectrum_inverse(u: &[Complex64], grid: &TimeGrid) -> Result<Vec<Complex64>> {
    let n = grid.n_samples;
    if u.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: u.len(),
        });
    }
    let sg = grid.spectral();
    let t = grid.t_start + grid.dt / 2.0;
    let mut y: Vec<Complex64> = u
        .iter()
        .enumerate()
        .map(|(m, v)| -v * Complex64::from_polar(1.0 / grid.dt, 2.0 * sg.lambda(m) * t))
        .collect();
    Fft::new(n).inverse_normalized(&mut y);
    Ok(y.iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { v.conj() } else { -v.conj() })
        .collect())
}

fn burst_start(config: &BurstConfig) -> usize {
    (config.nft_samples() - config.symbol_samples()) / 2 + config.burst_offset()
}

/// Samples of the NFT window occupied by the burst in the pseudo-time domain.
pub fn pseudo_burst_range(config: &BurstConfig) -> std::ops::Range<usize> {
    let off = burst_start(config);
    off..off + config.burst_samples()
}

/// The OFDM burst of `frame`, scaled by `amplitude`, centered in an NFT
/// window of `config.nft_samples()` samples.
pub fn nfdm_tx_pseudo(
    frame: &SymbolFrame,
    config: &BurstConfig,
    amplitude: f64,
) -> Result<[Vec<Complex64>; 2]> {
    let n = config.nft_samples();
    let off = burst_start(config);
    let mut pols = [
        vec![Complex64::new(0.0, 0.0); n],
        vec![Complex64::new(0.0, 0.0); n],
    ];
    for (p, out) in pols.iter_mut().enumerate().take(config.n_polarizations) {
        let w = burst_waveform(&frame.symbols[p], config)?;
        for (o, x) in out[off..off + w.len()].iter_mut().zip(w) {
            *o = x * amplitude;
        }
    }
    Ok(pols)
}

/// Reads the subcarrier symbols back out of an NFT-window waveform.
pub fn pseudo_to_frame(
    pseudo: [&[Complex64]; 2],
    config: &BurstConfig,
    amplitude: f64,
) -> Result<SymbolFrame> {
    let r = pseudo_burst_range(config);
    let mut frame = SymbolFrame::zeros(config);
    for p in 0..config.n_polarizations {
        let x = pseudo[p];
        if x.len() != config.nft_samples() {
            return Err(Error::LengthMismatch {
                expected: config.nft_samples(),
                actual: x.len(),
            });
        }
        frame.symbols[p] = burst_symbols(&x[r.clone()], config)?
            .iter()
            .map(|s| s / amplitude)
            .collect();
    }
    Ok(frame)
}

/// Multiplexes the subcarriers on the λ grid of `grid` exactly as OFDM does
/// in frequency.
pub fn u_encode(
    frame: &SymbolFrame,
    config: &BurstConfig,
    grid: &TimeGrid,
    amplitude: f64,
) -> Result<USpectrum> {
    let [x1, x2] = nfdm_tx_pseudo(frame, config, amplitude)?;
    Ok(USpectrum {
        u1: linear_spectrum(&x1, grid)?,
        u2: linear_spectrum(&x2, grid)?,
        grid: grid.spectral(),
    })
}

pub fn u_decode(
    u: &USpectrum,
    config: &BurstConfig,
    grid: &TimeGrid,
    amplitude: f64,
) -> Result<SymbolFrame> {
    if !u.grid.is_paired_with(grid) {
        return Err(Error::Config(
            "U grid is not paired with the time grid".into(),
        ));
    }
    let x1 = linear_spectrum_inverse(&u.u1, grid)?;
    let x2 = linear_spectrum_inverse(&u.u2, grid)?;
    pseudo_to_frame([&x1, &x2], config, amplitude)
}

/// Magnitude law between the U domain and the reflection coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UMap {
    /// `|q̂|² = 1 − e^{−|U|²}`. Bounded by 1, so the receiver can land outside it.
    #[default]
    Bounded,
    /// `|q̂|² = e^{|U|²} − 1`, the law under which the U-domain energy equals
    /// the signal energy in the scalar focusing channel. Defined everywhere.
    Unbounded,
}

impl UMap {
    pub fn id(self) -> &'static str {
        match self {
            UMap::Bounded => "bounded",
            UMap::Unbounded => "unbounded",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bounded" => Ok(UMap::Bounded),
            "unbounded" => Ok(UMap::Unbounded),
            other => Err(Error::Config(format!("unknown U-domain map '{other}'"))),
        }
    }

    fn qhat_gain(self, m: f64) -> f64 {
        let m2 = m * m;
        match self {
            UMap::Bounded => (-(-m2).exp_m1()).sqrt() / m,
            UMap::Unbounded => m2.exp_m1().sqrt() / m,
        }
    }

    fn u_gain(self, m: f64) -> f64 {
        let m2 = m * m;
        match self {
            UMap::Bounded => (-(-m2).ln_1p()).sqrt() / m,
            UMap::Unbounded => m2.ln_1p().sqrt() / m,
        }
    }
}

/// `|q̂ᵢ|² = 1 − e^{−|Uᵢ|²}` with the phase carried over.
pub fn u_to_qhat(u: &USpectrum) -> ContinuousSpectrum {
    u_to_qhat_with(u, UMap::Bounded)
}

pub fn u_to_qhat_with(u: &USpectrum, law: UMap) -> ContinuousSpectrum {
    let map = |x: &Complex64| {
        let m = x.norm();
        if m == 0.0 {
            *x
        } else {
            x * law.qhat_gain(m)
        }
    };
    ContinuousSpectrum {
        qhat1: u.u1.iter().map(map).collect(),
        qhat2: u.u2.iter().map(map).collect(),
        grid: u.grid,
    }
}

/// `Uᵢ = √(−log(1 − |q̂ᵢ|²))·e^{j∠q̂ᵢ}`; fails where `|q̂ᵢ| ≥ 1`.
pub fn qhat_to_u(cs: &ContinuousSpectrum) -> Result<USpectrum> {
    qhat_to_u_with(cs, UMap::Bounded)
}

pub fn qhat_to_u_with(cs: &ContinuousSpectrum, law: UMap) -> Result<USpectrum> {
    let map = |(k, x): (usize, &Complex64)| {
        let m = x.norm();
        if law == UMap::Bounded && !(m < 1.0) || !m.is_finite() {
            return Err(Error::OutsideUDomain {
                lambda_index: k,
                magnitude: m,
            });
        }
        Ok(if m == 0.0 { *x } else { x * law.u_gain(m) })
    };
    Ok(USpectrum {
        u1: cs
            .qhat1
            .iter()
            .enumerate()
            .map(map)
            .collect::<Result<_>>()?,
        u2: cs
            .qhat2
            .iter()
            .enumerate()
            .map(map)
            .collect::<Result<_>>()?,
        grid: cs.grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::map_bits;
    use crate::nft::{forward_nft, scattering_to_spectrum};
    use crate::signal::DualPolSignal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_frame(c: &BurstConfig, seed: u64) -> SymbolFrame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<u8> = (0..c.bits_per_frame())
            .map(|_| rng.random_range(0..2))
            .collect();
        map_bits(&bits, c).unwrap()
    }

    fn small() -> BurstConfig {
        BurstConfig {
            n_subcarriers: 16,
            guard_duration: 2e-9,
            ..BurstConfig::default()
        }
    }

    fn nft_grid(c: &BurstConfig) -> TimeGrid {
        TimeGrid::centered(c.nft_samples() as f64 * 0.3, c.nft_samples()).unwrap()
    }

    #[test]
    fn linear_spectrum_matches_direct_sum() {
        let g = TimeGrid::new(-3.1, 64, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<Complex64> = (0..64)
            .map(|_| Complex64::new(rng.random(), rng.random()))
            .collect();
        let u = linear_spectrum(&x, &g).unwrap();
        let sg = g.spectral();
        for (m, um) in u.iter().enumerate() {
            let l = sg.lambda(m);
            let direct: Complex64 = x
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    -v.conj() * g.dt * Complex64::from_polar(1.0, -2.0 * l * (g.t(k) + g.dt / 2.0))
                })
                .sum();
            assert!((um - direct).norm() < 1e-12);
        }
        let back = linear_spectrum_inverse(&u, &g).unwrap();
        assert!(crate::signal::relative_l2(&[&back], &[&x]) < 1e-14);
    }

    #[test]
    fn linear_spectrum_is_small_signal_limit_of_nft() {
        let g = TimeGrid::centered(40.0, 512).unwrap();
        let eps = 1e-3;
        let s = DualPolSignal::from_fn(g, |t| {
            (
                Complex64::from_polar(eps * (-t * t).exp(), 0.3 * t),
                Complex64::new(0.0, eps * (-(t - 1.0).powi(2)).exp()),
            )
        })
        .unwrap();
        let cs = scattering_to_spectrum(&forward_nft(&s).unwrap()).unwrap();
        let l1 = linear_spectrum(&s.q1, &g).unwrap();
        let l2 = linear_spectrum(&s.q2, &g).unwrap();
        let err = crate::signal::relative_l2(&[&cs.qhat1, &cs.qhat2], &[&l1, &l2]);
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn encode_decode_round_trip() {
        let c = small();
        let g = nft_grid(&c);
        let f = random_frame(&c, 1);
        let u = u_encode(&f, &c, &g, 0.7).unwrap();
        let back = u_decode(&u, &c, &g, 0.7).unwrap();
        for p in 0..2 {
            for (a, b) in f.symbols[p].iter().zip(&back.symbols[p]) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn encoding_is_linear() {
        let c = small();
        let g = nft_grid(&c);
        let z = u_encode(&SymbolFrame::zeros(&c), &c, &g, 1.0).unwrap();
        assert!(z.u1.iter().chain(&z.u2).all(|x| x.norm() == 0.0));
        let f = random_frame(&c, 2);
        let a = u_encode(&f, &c, &g, 1.0).unwrap();
        let b = u_encode(&f.scaled(2.5), &c, &g, 1.0).unwrap();
        for (x, y) in a.u1.iter().chain(&a.u2).zip(b.u1.iter().chain(&b.u2)) {
            assert!((x * 2.5 - y).norm() < 1e-12);
        }
    }

    #[test]
    fn qhat_map_closed_form_and_round_trip() {
        let g = TimeGrid::centered(8.0, 8).unwrap().spectral();
        let u = USpectrum {
            u1: vec![Complex64::from_polar(1.0, 0.4); 8],
            u2: (0..8)
                .map(|k| Complex64::from_polar(0.3 * k as f64, -1.0))
                .collect(),
            grid: g,
        };
        let q = u_to_qhat(&u);
        let expect = (1.0 - (-1.0f64).exp()).sqrt();
        for x in &q.qhat1 {
            assert!((x.norm() - expect).abs() < 1e-15);
            assert!((x.arg() - 0.4).abs() < 1e-15);
        }
        assert_eq!(q.qhat2[0], Complex64::new(0.0, 0.0));
        let back = qhat_to_u(&q).unwrap();
        for (a, b) in back.u1.iter().chain(&back.u2).zip(u.u1.iter().chain(&u.u2)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn qhat_outside_unit_disc_is_rejected() {
        let g = TimeGrid::centered(8.0, 4).unwrap().spectral();
        let mut cs = ContinuousSpectrum::zeros(g);
        cs.qhat2[3] = Complex64::new(0.0, 1.0);
        assert!(matches!(
            qhat_to_u(&cs),
            Err(Error::OutsideUDomain {
                lambda_index: 3,
                ..
            })
        ));
    }

    #[test]
    fn unbounded_map_round_trip() {
        let grid = TimeGrid::centered(4.0, 4).unwrap().spectral();
        let u = USpectrum {
            u1: vec![
                Complex64::new(0.3, -0.2),
                Complex64::new(2.0, 1.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
            u2: vec![Complex64::new(0.0, 3.0); 4],
            grid,
        };
        let q = u_to_qhat_with(&u, UMap::Unbounded);
        assert!(q.qhat2[0].norm() > 1.0);
        let back = qhat_to_u_with(&q, UMap::Unbounded).unwrap();
        for (a, b) in u.u1.iter().chain(&u.u2).zip(back.u1.iter().chain(&back.u2)) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(UMap::parse(UMap::Unbounded.id()).unwrap(), UMap::Unbounded);
        assert!(UMap::parse("log").is_err());
    }
}
