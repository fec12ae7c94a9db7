use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::FieldState;
use crate::error::{Error, Result};

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Ideal flat-gain lumped amplifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edfa {
    pub gain_db: f64,
    pub noise_figure_db: f64,
    pub frequency: f64,
}

impl Edfa {
    pub fn gain(&self) -> f64 {
        10f64.powf(self.gain_db / 10.0)
    }

    /// ASE variance per quadrature and polarization for a field sampled at
    /// `sample_rate`: `(G−1)·hν·F/2 · B_sim / 2`.
    pub fn noise_variance(&self, sample_rate: f64) -> f64 {
        let f_lin = 10f64.powf(self.noise_figure_db / 10.0);
        (self.gain() - 1.0) * PLANCK * self.frequency * f_lin / 2.0 * sample_rate / 2.0
    }
}

pub(crate) fn add_white_noise<R: Rng + ?Sized>(field: &mut FieldState, sigma: f64, rng: &mut R) {
    if sigma == 0.0 {
        return;
    }
    for x in field.a1.iter_mut().chain(field.a2.iter_mut()) {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *x += Complex64::new(re, im) * sigma;
    }
}

/// Scales the field by `√G` and, when `rng` is given, adds white ASE noise
/// over the simulated band.
pub fn edfa_amplify<R: Rng + ?Sized>(
    field: &FieldState,
    edfa: &Edfa,
    rng: Option<&mut R>,
) -> FieldState {
    let mut out = field.scaled(edfa.gain().sqrt());
    if let Some(rng) = rng {
        let sigma = edfa.noise_variance(1.0 / field.grid.dt).sqrt();
        add_white_noise(&mut out, sigma, rng);
    }
    out
}

/// Adds white Gaussian noise so that the OSNR in `reference_bandwidth`
/// (noise counted in both polarizations) equals `target_osnr_db`, taking
/// the field's current mean power as the signal power.
pub fn noise_loading<R: Rng + ?Sized>(
    field: &FieldState,
    target_osnr_db: f64,
    reference_bandwidth: f64,
    rng: &mut R,
) -> Result<FieldState> {
    if target_osnr_db == f64::INFINITY {
        return Ok(field.clone());
    }
    let p = field.power();
    if !(p > 0.0) {
        return Err(Error::NonPositivePower(p));
    }
    let osnr = 10f64.powf(target_osnr_db / 10.0);
    // PSD per polarization; both quadratures together
    let psd = p / (2.0 * osnr * reference_bandwidth);
    let sigma = (psd / field.grid.dt / 2.0).sqrt();
    let mut out = field.clone();
    add_white_noise(&mut out, sigma, rng);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field() -> FieldState {
        let g = TimeGrid::new(0.0, 1024, 1e-11).unwrap();
        FieldState::new(
            (0..1024)
                .map(|k| Complex64::from_polar(1e-2, k as f64 * 0.1))
                .collect(),
            vec![Complex64::new(5e-3, 0.0); 1024],
            g,
        )
        .unwrap()
    }

    #[test]
    fn unity_gain_adds_nothing() {
        let f = field();
        let amp = Edfa {
            gain_db: 0.0,
            noise_figure_db: 6.2,
            frequency: 193.55e12,
        };
        assert_eq!(amp.noise_variance(1e11), 0.0);
        let out = edfa_amplify(&f, &amp, Some(&mut ChaCha8Rng::seed_from_u64(1)));
        assert_eq!(out, f);
    }

    #[test]
    fn noiseless_gain_scales_power() {
        let f = field();
        let amp = Edfa {
            gain_db: 16.0,
            noise_figure_db: 6.2,
            frequency: 193.55e12,
        };
        let out = edfa_amplify::<ChaCha8Rng>(&f, &amp, None);
        assert!((out.power() / f.power() - amp.gain()).abs() < 1e-12 * amp.gain());
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let f = field();
        let amp = Edfa {
            gain_db: 16.0,
            noise_figure_db: 6.2,
            frequency: 193.55e12,
        };
        let a = edfa_amplify(&f, &amp, Some(&mut ChaCha8Rng::seed_from_u64(5)));
        let b = edfa_amplify(&f, &amp, Some(&mut ChaCha8Rng::seed_from_u64(5)));
        assert_eq!(a, b);
        assert_ne!(a, edfa_amplify::<ChaCha8Rng>(&f, &amp, None));
    }

    #[test]
    fn noise_loading_edge_cases() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(
            noise_loading(&f, f64::INFINITY, 12.5e9, &mut rng).unwrap(),
            f
        );
        let zero = FieldState::zeros(f.grid);
        assert!(matches!(
            noise_loading(&zero, 20.0, 12.5e9, &mut rng),
            Err(Error::NonPositivePower(_))
        ));
    }

    #[test]
    fn noise_loading_adds_expected_power() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut total = 0.0;
        let trials = 50;
        for _ in 0..trials {
            let out = noise_loading(&f, 10.0, 12.5e9, &mut rng).unwrap();
            let noise: f64 = out
                .a1
                .iter()
                .chain(&out.a2)
                .zip(f.a1.iter().chain(&f.a2))
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                / 1024.0;
            total += noise;
        }
        let expected = f.power() / 10.0 * (1.0 / f.grid.dt) / 12.5e9;
        assert!((total / trials as f64 / expected - 1.0).abs() < 0.02);
    }
}
