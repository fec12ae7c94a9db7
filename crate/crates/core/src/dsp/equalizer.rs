use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// 2×2 MIMO FIR filter. Output sample `n` is `Σₖ taps[k]·x[n − k + delay]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerTaps {
    pub taps: Vec<[[Complex64; 2]; 2]>,
    pub delay: usize,
}

impl EqualizerTaps {
    pub fn identity(n_taps: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let delay = n_taps / 2;
        let mut taps = vec![[[zero; 2]; 2]; n_taps.max(1)];
        taps[delay] = [[one, zero], [zero, one]];
        Self { taps, delay }
    }

    pub fn n_taps(&self) -> usize {
        self.taps.len()
    }
}

fn at(x: &[Complex64], i: isize) -> Complex64 {
    if i >= 0 && (i as usize) < x.len() {
        x[i as usize]
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Least-squares taps mapping `rx` onto `tx` over the samples in `range`.
pub fn train_equalizer(
    tx: [&[Complex64]; 2],
    rx: [&[Complex64]; 2],
    n_taps: usize,
    range: Range<usize>,
) -> Result<EqualizerTaps> {
    if n_taps == 0 {
        return Err(Error::Config("equalizer needs at least one tap".into()));
    }
    let len = tx[0].len();
    for s in tx.iter().chain(&rx) {
        if s.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: s.len(),
            });
        }
    }
    if range.end > len {
        return Err(Error::LengthMismatch {
            expected: len,
            actual: range.end,
        });
    }
    let rows = range.len();
    let cols = 2 * n_taps;
    if rows < 2 * cols {
        return Err(Error::TooFewSamples {
            needed: 2 * cols,
            got: rows,
        });
    }
    let delay = n_taps / 2;
    let a = DMatrix::from_fn(rows, cols, |r, c| {
        let n = (range.start + r) as isize;
        let (k, j) = (c / 2, c % 2);
        at(rx[j], n - k as isize + delay as isize)
    });
    let b = DMatrix::from_fn(rows, 2, |r, i| tx[i][range.start + r]);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin / smax < 1e-10 {
        return Err(Error::IllConditioned(format!(
            "training matrix condition {:.3e}",
            smax / smin
        )));
    }
    let w = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::IllConditioned(e.into()))?;
    let taps = (0..n_taps)
        .map(|k| {
            [
                [w[(2 * k, 0)], w[(2 * k + 1, 0)]],
                [w[(2 * k, 1)], w[(2 * k + 1, 1)]],
            ]
        })
        .collect();
    Ok(EqualizerTaps { taps, delay })
}

pub fn apply_equalizer(taps: &EqualizerTaps, x: [&[Complex64]; 2]) -> [Vec<Complex64>; 2] {
    let len = x[0].len();
    let mut y = [
        vec![Complex64::new(0.0, 0.0); len],
        vec![Complex64::new(0.0, 0.0); len],
    ];
    for n in 0..len {
        for (k, w) in taps.taps.iter().enumerate() {
            let i = n as isize - k as isize + taps.delay as isize;
            let (x1, x2) = (at(x[0], i), at(x[1], i));
            y[0][n] += w[0][0] * x1 + w[0][1] * x2;
            y[1][n] += w[1][0] * x1 + w[1][1] * x2;
        }
    }
    y
}
