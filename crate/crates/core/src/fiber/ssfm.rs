//! Symmetric split-step Fourier integration of
//! `∂A/∂Z = −α/2·A + j(β₂/2)·∂²A/∂T² − j(8/9)γ|A|²A`
//! with coarse-step PMD sections and lumped amplification.

use num_complex::Complex64;
use rand::Rng;

use super::amplifier::add_white_noise;
use super::{Edfa, FiberParams, FieldState, PmdRealization, PmdSection};
use crate::error::{Error, Result};
use crate::fft::{angular_frequencies, Fft};

const NONLINEAR_FACTOR: f64 = 8.0 / 9.0;

/// What happens at the end of each span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Amplification {
    /// No amplifier.
    Off,
    /// Gain `e^{α·span}` without noise.
    Noiseless,
    /// Gain `e^{α·span}` plus ASE at the fiber's noise figure.
    Ase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsfmOptions {
    /// Maximum step length, m.
    pub step_size: f64,
    pub amplification: Amplification,
}

impl Default for SsfmOptions {
    fn default() -> Self {
        Self {
            step_size: 100.0,
            amplification: Amplification::Ase,
        }
    }
}

/// Split-step state; the field is held in the frequency domain between steps.
struct Stepper {
    fft: Fft,
    omega: Vec<f64>,
    alpha: f64,
    beta2: f64,
    gamma: f64,
    half_cache: Vec<(f64, Vec<Complex64>)>,
    x1: Vec<Complex64>,
    x2: Vec<Complex64>,
    t1: Vec<Complex64>,
    t2: Vec<Complex64>,
}

impl Stepper {
    fn new(field: &FieldState, alpha: f64, beta2: f64, gamma: f64) -> Self {
        let n = field.grid.n_samples;
        let fft = Fft::new(n);
        let mut x1 = field.a1.clone();
        let mut x2 = field.a2.clone();
        fft.forward(&mut x1);
        fft.forward(&mut x2);
        Self {
            omega: angular_frequencies(n, field.grid.dt),
            fft,
            alpha,
            beta2,
            gamma,
            half_cache: Vec::new(),
            x1,
            x2,
            t1: vec![Complex64::new(0.0, 0.0); n],
            t2: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Index into the cache of `exp(−jβ₂ω²h/4 − αh/4)`.
    fn half_factor(&mut self, h: f64) -> usize {
        if let Some(i) = self.half_cache.iter().position(|(k, _)| *k == h) {
            return i;
        }
        let loss = (-self.alpha * h / 4.0).exp();
        let f = self
            .omega
            .iter()
            .map(|w| Complex64::from_polar(loss, -self.beta2 * w * w * h / 4.0))
            .collect();
        self.half_cache.push((h, f));
        self.half_cache.len() - 1
    }

    fn apply_half(&mut self, idx: usize) {
        let f = &self.half_cache[idx].1;
        for ((a, b), h) in self.x1.iter_mut().zip(self.x2.iter_mut()).zip(f) {
            *a *= h;
            *b *= h;
        }
    }

    /// Length over which the nonlinear phase accumulates at midpoint power.
    fn effective_length(&self, h: f64) -> f64 {
        let x = self.alpha * h / 2.0;
        if x.abs() < 1e-10 {
            h
        } else {
            2.0 * x.sinh() / self.alpha
        }
    }

    /// One symmetric step of signed length `h` (negative runs backwards).
    fn step(&mut self, h: f64) {
        let idx = self.half_factor(h);
        self.apply_half(idx);
        if self.gamma != 0.0 {
            self.t1.copy_from_slice(&self.x1);
            self.t2.copy_from_slice(&self.x2);
            self.fft.inverse_normalized(&mut self.t1);
            self.fft.inverse_normalized(&mut self.t2);
            let k = -NONLINEAR_FACTOR * self.gamma * self.effective_length(h);
            for (a, b) in self.t1.iter_mut().zip(self.t2.iter_mut()) {
                let rot = Complex64::from_polar(1.0, k * (a.norm_sqr() + b.norm_sqr()));
                *a *= rot;
                *b *= rot;
            }
            self.x1.copy_from_slice(&self.t1);
            self.x2.copy_from_slice(&self.t2);
            self.fft.forward(&mut self.x1);
            self.fft.forward(&mut self.x2);
        }
        self.apply_half(idx);
    }

    /// Integrates over `length` (signed) in equal steps no longer than `max_step`.
    fn integrate(&mut self, length: f64, max_step: f64) {
        if length == 0.0 {
            return;
        }
        let n = (length.abs() / max_step - 1e-9).ceil().max(1.0) as usize;
        let h = length / n as f64;
        for _ in 0..n {
            self.step(h);
        }
    }

    /// Section rotation and phase, then DGD, applied in the frequency domain.
    fn apply_section(&mut self, s: &PmdSection) {
        let j = s.jones();
        for ((a, b), w) in self.x1.iter_mut().zip(self.x2.iter_mut()).zip(&self.omega) {
            let d = Complex64::from_polar(1.0, w * s.dgd / 2.0);
            let na = j[0][0] * *a + j[0][1] * *b;
            let nb = j[1][0] * *a + j[1][1] * *b;
            *a = d * na;
            *b = d.conj() * nb;
        }
    }

    fn scale(&mut self, factor: f64) {
        self.x1
            .iter_mut()
            .chain(self.x2.iter_mut())
            .for_each(|x| *x *= factor);
    }

    fn is_finite(&self) -> bool {
        self.x1
            .iter()
            .chain(&self.x2)
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    fn time_domain(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut a1 = self.x1.clone();
        let mut a2 = self.x2.clone();
        self.fft.inverse_normalized(&mut a1);
        self.fft.inverse_normalized(&mut a2);
        (a1, a2)
    }

    fn load_time_domain(&mut self, a1: &[Complex64], a2: &[Complex64]) {
        self.x1.copy_from_slice(a1);
        self.x2.copy_from_slice(a2);
        self.fft.forward(&mut self.x1);
        self.fft.forward(&mut self.x2);
    }
}

/// Propagates `field` through `params.n_spans` spans.
///
/// With `pmd`, each section's rotation, phase and DGD are applied at the
/// section start; in between the PMD-free equation is integrated. `rng` is
/// only drawn from for ASE noise.
pub fn ssfm_propagate<R: Rng + ?Sized>(
    field: &FieldState,
    params: &FiberParams,
    pmd: Option<&PmdRealization>,
    rng: &mut R,
    options: &SsfmOptions,
) -> Result<FieldState> {
    params.validate()?;
    if !(options.step_size > 0.0) {
        return Err(Error::Config("step size must be positive".into()));
    }
    if pmd.is_some() && options.step_size > params.section_length {
        return Err(Error::Config(
            "step size must not exceed the PMD section length".into(),
        ));
    }
    let mut st = Stepper::new(field, params.alpha, params.beta2, params.gamma);
    let section_len = params.section_length;
    let mut next_section = 0usize;
    let mut z = field.position;
    let edfa = Edfa {
        gain_db: params.span_loss_db(),
        noise_figure_db: params.noise_figure_db,
        frequency: params.center_frequency,
    };

    for span in 0..params.n_spans {
        let span_start = span as f64 * params.span_length;
        let span_end = span_start + params.span_length;
        let mut local = span_start;
        while local < span_end - 1e-9 {
            let mut seg_end = span_end;
            if let Some(pmd) = pmd {
                let boundary = next_section as f64 * section_len;
                if next_section < pmd.sections.len() && (boundary - local).abs() < 1e-6 {
                    st.apply_section(&pmd.sections[next_section]);
                    next_section += 1;
                }
                let upcoming = next_section as f64 * section_len;
                if next_section < pmd.sections.len() && upcoming < seg_end {
                    seg_end = upcoming;
                }
            }
            st.integrate(seg_end - local, options.step_size);
            local = seg_end;
        }
        z += params.span_length;
        if !st.is_finite() {
            return Err(Error::Divergence { position_m: z });
        }
        match options.amplification {
            Amplification::Off => {}
            Amplification::Noiseless => st.scale(edfa.gain().sqrt()),
            Amplification::Ase => {
                st.scale(edfa.gain().sqrt());
                let (a1, a2) = st.time_domain();
                let mut f = FieldState {
                    a1,
                    a2,
                    grid: field.grid,
                    position: z,
                };
                add_white_noise(&mut f, edfa.noise_variance(1.0 / field.grid.dt).sqrt(), rng);
                st.load_time_domain(&f.a1, &f.a2);
            }
        }
    }
    let (a1, a2) = st.time_domain();
    Ok(FieldState {
        a1,
        a2,
        grid: field.grid,
        position: z,
    })
}

/// Digital backpropagation over the whole link: each span, last first, has
/// its amplifier gain removed and is integrated backwards in
/// `steps_per_span` symmetric steps with loss turned into gain. The
/// nonlinear phase of each step is weighted by the power profile within the
/// step, so at one step per span it uses the span's `γ_eff`.
pub fn dbp(field: &FieldState, params: &FiberParams, steps_per_span: usize) -> Result<FieldState> {
    if steps_per_span == 0 {
        return Err(Error::Config("DBP needs at least one step per span".into()));
    }
    let mut st = Stepper::new(field, params.alpha, params.beta2, params.gamma);
    let gain_inv = (-params.alpha * params.span_length / 2.0).exp();
    let h = params.span_length / steps_per_span as f64;
    let mut z = field.position;
    for _ in 0..params.n_spans {
        st.scale(gain_inv);
        for _ in 0..steps_per_span {
            st.step(-h);
        }
        z -= params.span_length;
        if !st.is_finite() {
            return Err(Error::Divergence { position_m: z });
        }
    }
    let (a1, a2) = st.time_domain();
    Ok(FieldState {
        a1,
        a2,
        grid: field.grid,
        position: z.max(0.0),
    })
}
