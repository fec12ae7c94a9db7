use num_complex::Complex64;

use super::ScatteringData;
use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::grid::SpectralGrid;
use crate::signal::DualPolSignal;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_finite(values: &[&[Complex64]]) -> Result<()> {
    let n = values[0].len();
    for k in 0..n {
        if values
            .iter()
            .any(|v| !(v[k].re.is_finite() && v[k].im.is_finite()))
        {
            return Err(Error::NumericalOverflow { lambda_index: k });
        }
    }
    Ok(())
}

fn normalization(q1: Complex64, q2: Complex64) -> f64 {
    1.0 / (1.0 + q1.norm_sqr() + q2.norm_sqr()).sqrt()
}

/// The lower block of the transfer step is `I + κ·Q̄Qᵀ`: it scales the
/// component along `Q̄` by `c` and leaves the orthogonal one untouched, which
/// keeps the vector scheme second-order accurate. `κ = (c − 1)/|Q|²`.
pub(crate) fn lower_block_coefficient(q1: Complex64, q2: Complex64) -> f64 {
    let r = (1.0 + q1.norm_sqr() + q2.norm_sqr()).sqrt();
    -1.0 / (r * (1.0 + r))
}

/// Ablowitz-Ladik scattering at arbitrary real λ values, one O(N) sweep per
/// point. Returns `[a, b₁, b₂]` per λ.
pub fn scattering_at(signal: &DualPolSignal, lambdas: &[f64]) -> Result<Vec<[Complex64; 3]>> {
    let dt = signal.grid.dt;
    let t0 = signal.grid.t_start;
    let t1 = signal.grid.t_end();
    let taps: Vec<(Complex64, Complex64, f64, f64)> = signal
        .q1
        .iter()
        .zip(&signal.q2)
        .map(|(&q1, &q2)| {
            let (q1, q2) = (q1 * dt, q2 * dt);
            (
                q1,
                q2,
                normalization(q1, q2),
                lower_block_coefficient(q1, q2),
            )
        })
        .collect();

    let mut out = Vec::with_capacity(lambdas.len());
    for (idx, &lambda) in lambdas.iter().enumerate() {
        // z^{1/2} = e^{-jλΔT}
        let half = Complex64::from_polar(1.0, -lambda * dt);
        let half_inv = half.conj();
        let mut v0 = Complex64::from_polar(1.0, -lambda * t0);
        let mut v1 = ZERO;
        let mut v2 = ZERO;
        for &(q1, q2, c, kappa) in &taps {
            let proj = kappa * (q1 * v1 + q2 * v2);
            let n0 = c * (half * v0 + q1 * v1 + q2 * v2);
            v1 = half_inv * (v1 + q1.conj() * proj) - c * q1.conj() * v0;
            v2 = half_inv * (v2 + q2.conj() * proj) - c * q2.conj() * v0;
            v0 = n0;
        }
        let a = v0 * Complex64::from_polar(1.0, lambda * t1);
        let rot = Complex64::from_polar(1.0, -lambda * t1);
        let triple = [a, v1 * rot, v2 * rot];
        if triple
            .iter()
            .any(|x| !(x.re.is_finite() && x.im.is_finite()))
        {
            return Err(Error::NumericalOverflow { lambda_index: idx });
        }
        out.push(triple);
    }
    Ok(out)
}

/// Reference O(N²) forward NFT: one time-domain Ablowitz-Ladik sweep per λ.
pub fn forward_nft_direct(signal: &DualPolSignal, grid: &SpectralGrid) -> Result<ScatteringData> {
    if !grid.is_paired_with(&signal.grid) {
        return Err(Error::Config(
            "spectral grid is not paired with the signal's time grid".into(),
        ));
    }
    let coeffs = scattering_at(signal, &grid.lambdas())?;
    let (mut a, mut b1, mut b2) = (Vec::new(), Vec::new(), Vec::new());
    for [x, y, z] in coeffs {
        a.push(x);
        b1.push(y);
        b2.push(z);
    }
    Ok(ScatteringData {
        a,
        b1,
        b2,
        grid: *grid,
    })
}

/// Evaluates `Σ_l c[l] w^l` at every λ of the grid, where
/// `w = e^{2jλΔT}` and `w^l(λ_m) = (−1)^l e^{2πjml/N}`.
pub(crate) fn evaluate_polynomial(fft: &Fft, coeffs: &mut [Complex64]) {
    for (l, c) in coeffs.iter_mut().enumerate() {
        if l % 2 == 1 {
            *c = -*c;
        }
    }
    fft.inverse(coeffs);
}

/// Inverse of [`evaluate_polynomial`].
pub(crate) fn polynomial_coefficients(fft: &Fft, values: &mut [Complex64]) {
    fft.forward(values);
    let scale = 1.0 / values.len() as f64;
    for (l, c) in values.iter_mut().enumerate() {
        *c *= if l % 2 == 1 { -scale } else { scale };
    }
}

/// Phase `e^{-jλ(2 t_end − ΔT)}` relating `bᵢ(λ)` to the polynomial `Bᵢ(λ)`.
pub(crate) fn b_phase(grid: &SpectralGrid, t_end: f64, dt: f64) -> Vec<Complex64> {
    (0..grid.n_samples)
        .map(|m| Complex64::from_polar(1.0, -grid.lambda(m) * (2.0 * t_end - dt)))
        .collect()
}

/// Forward NFT via the frequency-domain (polynomial coefficient) iteration.
///
/// `Ã` starts as `δ_{0,l}`, `B̃ᵢ` as zero; after step `k` both have degree
/// below `k+1`, so only the active prefix is updated. The result lives on the
/// canonical spectral grid of the signal.
pub fn forward_nft(signal: &DualPolSignal) -> Result<ScatteringData> {
    let n = signal.len();
    let dt = signal.grid.dt;
    if !signal
        .q1
        .iter()
        .chain(&signal.q2)
        .all(|x| x.re.is_finite() && x.im.is_finite())
    {
        return Err(Error::Config("signal contains non-finite samples".into()));
    }
    let grid = signal.grid.spectral();

    let mut a = vec![ZERO; n];
    let mut b1 = vec![ZERO; n];
    let mut b2 = vec![ZERO; n];
    a[0] = Complex64::new(1.0, 0.0);

    for k in 0..n {
        let q1 = signal.q1[k] * dt;
        let q2 = signal.q2[k] * dt;
        let c = normalization(q1, q2);
        let kappa = lower_block_coefficient(q1, q2);
        let (mq1, mq2) = (-q1.conj(), -q2.conj());
        // descending l keeps B[l-1] at its previous value when it is read
        for l in (1..=k.min(n - 1)).rev() {
            let (al, s1, s2) = (a[l], b1[l - 1], b2[l - 1]);
            let qs = q1 * s1 + q2 * s2;
            a[l] = c * (al + qs);
            b1[l] = c * mq1 * al + s1 - kappa * mq1 * qs;
            b2[l] = c * mq2 * al + s2 - kappa * mq2 * qs;
        }
        // the circular shift brings in B[N-1], which is zero for k < N
        let a0 = a[0];
        a[0] = c * a0;
        b1[0] = c * mq1 * a0;
        b2[0] = c * mq2 * a0;
    }

    let fft = Fft::new(n);
    evaluate_polynomial(&fft, &mut a);
    evaluate_polynomial(&fft, &mut b1);
    evaluate_polynomial(&fft, &mut b2);
    let phase = b_phase(&grid, signal.grid.t_end(), dt);
    for ((x, y), p) in b1.iter_mut().zip(b2.iter_mut()).zip(&phase) {
        *x *= p;
        *y *= p;
    }
    check_finite(&[&a, &b1, &b2])?;
    Ok(ScatteringData { a, b1, b2, grid })
}

/// Scalar (single polarization) NFT with the 2×2 Ablowitz-Ladik iteration.
/// Returns `(a, b)` on the canonical spectral grid.
pub fn forward_nft_scalar(
    q: &[Complex64],
    time: &crate::grid::TimeGrid,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = time.n_samples;
    if q.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: q.len(),
        });
    }
    let dt = time.dt;
    let mut a = vec![ZERO; n];
    let mut b = vec![ZERO; n];
    a[0] = Complex64::new(1.0, 0.0);
    for (k, &qk) in q.iter().enumerate() {
        let qk = qk * dt;
        let c = 1.0 / (1.0 + qk.norm_sqr()).sqrt();
        let mq = -qk.conj();
        for l in (1..=k.min(n - 1)).rev() {
            let (al, s) = (a[l], b[l - 1]);
            a[l] = c * (al + qk * s);
            b[l] = c * (mq * al + s);
        }
        let a0 = a[0];
        a[0] = c * a0;
        b[0] = c * mq * a0;
    }
    let grid = time.spectral();
    let fft = Fft::new(n);
    evaluate_polynomial(&fft, &mut a);
    evaluate_polynomial(&fft, &mut b);
    for (x, p) in b.iter_mut().zip(b_phase(&grid, time.t_end(), dt)) {
        *x *= p;
    }
    check_finite(&[&a, &b])?;
    Ok((a, b))
}
