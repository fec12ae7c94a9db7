use std::f64::consts::PI;

use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// Maxwell law fitted by matching the second moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellFit {
    /// Scale `a`, with `⟨x²⟩ = 3a²`.
    pub scale: f64,
    pub mean: f64,
    pub rms: f64,
    pub ks_statistic: f64,
    pub p_value: f64,
}

pub fn maxwell_cdf(x: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let u = x / scale;
    erf(u / 2f64.sqrt()) - (2.0 / PI).sqrt() * u * (-u * u / 2.0).exp()
}

/// Asymptotic Kolmogorov survival function with the Stephens small-sample
/// correction.
fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let l = (sn + 0.12 + 0.11 / sn) * d;
    if l < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * l * l).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn maxwell_fit(samples: &[f64]) -> Result<MaxwellFit> {
    if samples.len() < 100 {
        return Err(Error::TooFewSamples {
            needed: 100,
            got: samples.len(),
        });
    }
    if samples.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::DegenerateFit(
            "samples must be finite and non-negative".into(),
        ));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let rms = (samples.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    if rms == 0.0 {
        return Err(Error::DegenerateFit("all samples are zero".into()));
    }
    let scale = rms / 3f64.sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let ks_statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = maxwell_cdf(x, scale);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok(MaxwellFit {
        scale,
        mean,
        rms,
        ks_statistic,
        p_value: ks_p_value(ks_statistic, samples.len()),
    })
}

/// `mean + n_std·std` of the Maxwell law with rms `d_pmd·√L`.
pub fn coverage_interval(d_pmd: f64, total_length: f64, n_std: f64) -> f64 {
    let a = d_pmd * total_length.sqrt() / 3f64.sqrt();
    let mean = 2.0 * a * (2.0 / PI).sqrt();
    let std = a * ((3.0 * PI - 8.0) / PI).sqrt();
    mean + n_std * std
}

/// Probability that the DGD exceeds `interval`.
pub fn outage_probability(d_pmd: f64, total_length: f64, interval: f64) -> f64 {
    let a = d_pmd * total_length.sqrt() / 3f64.sqrt();
    if a == 0.0 {
        return 0.0;
    }
    1.0 - maxwell_cdf(interval, a)
}

/// Equalizer length covering the mean + 3σ DGD at `sample_rate`.
pub fn required_taps(d_pmd: f64, total_length: f64, sample_rate: f64) -> usize {
    let n = (coverage_interval(d_pmd, total_length, 3.0) * sample_rate).ceil();
    (n as usize).max(1)
}
