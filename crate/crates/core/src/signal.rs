use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Two-component complex envelope sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPolSignal {
    pub q1: Vec<Complex64>,
    pub q2: Vec<Complex64>,
    pub grid: TimeGrid,
}

impl DualPolSignal {
    pub fn new(q1: Vec<Complex64>, q2: Vec<Complex64>, grid: TimeGrid) -> Result<Self> {
        for q in [&q1, &q2] {
            if q.len() != grid.n_samples {
                return Err(Error::LengthMismatch {
                    expected: grid.n_samples,
                    actual: q.len(),
                });
            }
        }
        if !q1
            .iter()
            .chain(&q2)
            .all(|x| x.re.is_finite() && x.im.is_finite())
        {
            return Err(Error::Config("signal contains non-finite samples".into()));
        }
        Ok(Self { q1, q2, grid })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); grid.n_samples];
        Self {
            q1: zero.clone(),
            q2: zero,
            grid,
        }
    }

    /// Builds a signal by evaluating `f(t) -> (q1, q2)` at each grid point.
    pub fn from_fn(
        grid: TimeGrid,
        mut f: impl FnMut(f64) -> (Complex64, Complex64),
    ) -> Result<Self> {
        let (q1, q2) = (0..grid.n_samples).map(|k| f(grid.t(k))).unzip();
        Self::new(q1, q2, grid)
    }

    pub fn len(&self) -> usize {
        self.grid.n_samples
    }

    pub fn is_empty(&self) -> bool {
        self.grid.n_samples == 0
    }

    /// Largest magnitude at the window edges. NFT results are only
    /// meaningful when this is small.
    pub fn boundary_decay(&self) -> f64 {
        let n = self.len();
        [self.q1[0], self.q1[n - 1], self.q2[0], self.q2[n - 1]]
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    /// `∫ |q1|² + |q2|² dt` by the rectangle rule.
    pub fn energy(&self) -> f64 {
        self.q1
            .iter()
            .chain(&self.q2)
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            * self.grid.dt
    }

    /// Applies a constant 2×2 matrix samplewise.
    pub fn rotated(&self, m: [[Complex64; 2]; 2]) -> Self {
        let (q1, q2) = self
            .q1
            .iter()
            .zip(&self.q2)
            .map(|(&a, &b)| (m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b))
            .unzip();
        Self {
            q1,
            q2,
            grid: self.grid,
        }
    }

    /// Circular shift by `m` samples (positive delays the signal).
    pub fn shifted(&self, m: isize) -> Self {
        let n = self.len() as isize;
        let s = m.rem_euclid(n) as usize;
        let mut q1 = self.q1.clone();
        let mut q2 = self.q2.clone();
        q1.rotate_right(s);
        q2.rotate_right(s);
        Self {
            q1,
            q2,
            grid: self.grid,
        }
    }
}

/// Relative L² distance `‖x − y‖ / ‖y‖` over the concatenation of slices.
pub fn relative_l2(x: &[&[Complex64]], y: &[&[Complex64]]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in x.iter().zip(y) {
        for (p, q) in a.iter().zip(b.iter()) {
            num += (p - q).norm_sqr();
            den += q.norm_sqr();
        }
    }
    (num / den).sqrt()
}
