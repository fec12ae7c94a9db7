use num_complex::Complex64;

use super::forward::{b_phase, lower_block_coefficient, polynomial_coefficients};
use super::{ContinuousSpectrum, ScatteringData, DEFAULT_A_FLOOR};
use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::grid::TimeGrid;
use crate::signal::DualPolSignal;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Recovers `∠a` from `log|a|` on the periodic λ grid.
///
/// `log a` is a power series in `w = e^{2jλΔT}` that is analytic for
/// `|w| < 1` (λ in the upper half plane), so its phase is obtained by
/// dropping the negative-`w` Fourier components of `log|a|` and doubling the
/// positive ones.
pub fn phase_from_log_modulus(log_abs: &[f64], fft: &Fft) -> Vec<f64> {
    let n = log_abs.len();
    let mut buf: Vec<Complex64> = log_abs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.forward(&mut buf);
    let positive_end = n.div_ceil(2);
    for (l, x) in buf.iter_mut().enumerate() {
        if l == 0 || (n.is_multiple_of(2) && l == n / 2) {
            continue;
        }
        *x *= if l < positive_end { 2.0 } else { 0.0 };
    }
    fft.inverse_normalized(&mut buf);
    buf.iter().map(|x| x.im).collect()
}

/// Builds scattering data from a continuous spectrum assuming no discrete
/// eigenvalues: `|a|` from unimodularity, `∠a` by the discrete Hilbert
/// transform, `bᵢ = q̂ᵢ·a`.
pub fn spectrum_to_scattering(cs: &ContinuousSpectrum) -> Result<ScatteringData> {
    let n = cs.grid.n_samples;
    if cs.qhat1.len() != n || cs.qhat2.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: cs.qhat1.len().min(cs.qhat2.len()),
        });
    }
    if !cs
        .qhat1
        .iter()
        .chain(&cs.qhat2)
        .all(|x| x.re.is_finite() && x.im.is_finite())
    {
        return Err(Error::Config("spectrum contains non-finite values".into()));
    }
    let fft = Fft::new(n);
    let log_abs: Vec<f64> = cs
        .qhat1
        .iter()
        .zip(&cs.qhat2)
        .map(|(a, b)| -0.5 * (a.norm_sqr() + b.norm_sqr()).ln_1p())
        .collect();
    let phase = phase_from_log_modulus(&log_abs, &fft);
    let a: Vec<Complex64> = log_abs
        .iter()
        .zip(&phase)
        .map(|(&m, &p)| Complex64::from_polar(m.exp(), p))
        .collect();
    let b1 = cs.qhat1.iter().zip(&a).map(|(q, a)| q * a).collect();
    let b2 = cs.qhat2.iter().zip(&a).map(|(q, a)| q * a).collect();
    Ok(ScatteringData {
        a,
        b1,
        b2,
        grid: cs.grid,
    })
}

/// Inverse NFT by layer peeling with the first-order inverse step.
pub fn inverse_nft(cs: &ContinuousSpectrum, grid: &TimeGrid) -> Result<DualPolSignal> {
    peel(cs, grid, DEFAULT_A_FLOOR, false)
}

pub fn inverse_nft_with_floor(
    cs: &ContinuousSpectrum,
    grid: &TimeGrid,
    floor: f64,
) -> Result<DualPolSignal> {
    peel(cs, grid, floor, false)
}

/// Layer peeling with the exact inverse of the forward transfer step, so
/// that `forward_nft` undoes it to rounding.
pub fn inverse_nft_exact(cs: &ContinuousSpectrum, grid: &TimeGrid) -> Result<DualPolSignal> {
    peel(cs, grid, DEFAULT_A_FLOOR, true)
}

/// The scattering data at `t_end` is expanded in polynomial coefficients;
/// each step reads `Q̄ᵢ[k] = −B̃ᵢ[0]/Ã[0]` and applies an inverse transfer
/// step, which lowers the degree by one. The first-order step is the
/// forward matrix inverted with the `O(Q²)` terms dropped.
fn peel(
    cs: &ContinuousSpectrum,
    grid: &TimeGrid,
    floor: f64,
    exact: bool,
) -> Result<DualPolSignal> {
    if !cs.grid.is_paired_with(grid) {
        return Err(Error::Config(
            "spectrum grid is not paired with the requested time grid".into(),
        ));
    }
    let n = grid.n_samples;
    let dt = grid.dt;
    let sd = spectrum_to_scattering(cs)?;
    let fft = Fft::new(n);

    let mut a = sd.a;
    let phase = b_phase(&cs.grid, grid.t_end(), dt);
    let mut b1: Vec<Complex64> = sd
        .b1
        .iter()
        .zip(&phase)
        .map(|(b, p)| b * p.conj())
        .collect();
    let mut b2: Vec<Complex64> = sd
        .b2
        .iter()
        .zip(&phase)
        .map(|(b, p)| b * p.conj())
        .collect();
    polynomial_coefficients(&fft, &mut a);
    polynomial_coefficients(&fft, &mut b1);
    polynomial_coefficients(&fft, &mut b2);

    let mut q1 = vec![ZERO; n];
    let mut q2 = vec![ZERO; n];
    for k in (0..n).rev() {
        let a0 = a[0];
        if !(a0.norm() > floor) {
            return Err(Error::LayerPeelingBreakdown {
                time_index: k,
                magnitude: a0.norm(),
            });
        }
        let c1 = -b1[0] / a0; // conj(Q1[k])
        let c2 = -b2[0] / a0;
        let (s1, s2) = (c1.conj(), c2.conj());
        let c = 1.0 / (1.0 + s1.norm_sqr() + s2.norm_sqr()).sqrt();
        let kappa = lower_block_coefficient(s1, s2);
        // V[k+1] has degree ≤ k; V[k] keeps degree < k
        for l in 0..k {
            let (al, x1, x2) = (a[l], b1[l], b2[l]);
            let (an, y1, y2) = (a[l + 1], b1[l + 1], b2[l + 1]);
            a[l] = c * (al - s1 * x1 - s2 * x2);
            if exact {
                let proj = kappa * (s1 * y1 + s2 * y2);
                b1[l] = c * c1 * an + y1 + c1 * proj;
                b2[l] = c * c2 * an + y2 + c2 * proj;
            } else {
                b1[l] = c * (c1 * an + y1);
                b2[l] = c * (c2 * an + y2);
            }
        }
        a[k] = ZERO;
        b1[k] = ZERO;
        b2[k] = ZERO;
        q1[k] = s1 / dt;
        q2[k] = s2 / dt;
        if !(q1[k].re.is_finite()
            && q1[k].im.is_finite()
            && q2[k].re.is_finite()
            && q2[k].im.is_finite())
        {
            return Err(Error::LayerPeelingBreakdown {
                time_index: k,
                magnitude: a0.norm(),
            });
        }
    }
    DualPolSignal::new(q1, q2, *grid)
}
