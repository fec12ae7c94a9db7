//! Thin wrapper over rustfft with unnormalized forward/inverse transforms.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft as RustFft, FftPlanner};

/// Forward and inverse plans for one transform length.
///
/// Forward is `X[m] = Σ x[k] e^{-2πjmk/N}`, inverse is the same with `+` and
/// no `1/N`.
#[derive(Clone)]
pub struct Fft {
    forward: Arc<dyn RustFft<f64>>,
    inverse: Arc<dyn RustFft<f64>>,
    len: usize,
}

impl Fft {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
    }

    /// Inverse transform scaled by `1/N`.
    pub fn inverse_normalized(&self, buf: &mut [Complex64]) {
        self.inverse(buf);
        let scale = 1.0 / self.len as f64;
        buf.iter_mut().for_each(|x| *x *= scale);
    }
}

impl std::fmt::Debug for Fft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft").field("len", &self.len).finish()
    }
}

/// Angular frequencies (rad/s in the units of `dt`) of the DFT bins, in FFT order.
pub fn angular_frequencies(n: usize, dt: f64) -> Vec<f64> {
    let step = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    (0..n)
        .map(|k| {
            let k = if k < n.div_ceil(2) {
                k as f64
            } else {
                k as f64 - n as f64
            };
            k * step
        })
        .collect()
}
