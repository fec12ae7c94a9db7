//! Experiment configuration. Keys carry their units in the name; values are
//! converted to SI once, in [`ExperimentConfig::fiber`] and
//! [`ExperimentConfig::burst`].

use std::fmt::Write as _;
use std::path::Path;

use nfdm_core::dsp::{estimate_guard, BurstConfig, Modulation, UMap};
use nfdm_core::fiber::{gamma_eff, normalization_scales, FiberParams, NormalizationScales};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Channel model between transmitter and receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "b2b")]
    BackToBack,
    #[serde(rename = "lossless")]
    Lossless,
    #[serde(rename = "lossy")]
    Lossy,
    /// Lossless fiber with γ replaced by the path average of the lossy span.
    #[serde(rename = "transformed-lossless")]
    TransformedLossless,
    #[serde(rename = "lossy+pmd")]
    LossyPmd,
}

impl Model {
    pub fn id(self) -> &'static str {
        match self {
            Model::BackToBack => "b2b",
            Model::Lossless => "lossless",
            Model::Lossy => "lossy",
            Model::TransformedLossless => "transformed-lossless",
            Model::LossyPmd => "lossy+pmd",
        }
    }

    pub fn has_loss(self) -> bool {
        matches!(self, Model::Lossy | Model::LossyPmd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "nfdm")]
    Nfdm,
    #[serde(rename = "ofdm")]
    Ofdm,
    #[serde(rename = "ofdm+dbp")]
    OfdmDbp,
}

impl Mode {
    pub fn id(self) -> &'static str {
        match self {
            Mode::Nfdm => "nfdm",
            Mode::Ofdm => "ofdm",
            Mode::OfdmDbp => "ofdm+dbp",
        }
    }
}

/// Which nonlinearity the NFDM transceiver normalizes with on lossy links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeGamma {
    /// Path-averaged `γ_eff` of one span.
    Eff,
    /// The fiber's own `γ`.
    Plain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub alpha_db_per_km: f64,
    pub beta2_ps2_per_km: f64,
    pub gamma_per_w_per_km: f64,
    pub span_length_km: f64,
    pub n_spans: usize,
    pub pmd_ps_per_sqrt_km: f64,
    pub section_length_km: f64,
    pub noise_figure_db: f64,
    pub center_frequency_thz: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self::from_params(&FiberParams::default())
    }
}

impl LinkSection {
    pub fn from_params(p: &FiberParams) -> Self {
        Self {
            alpha_db_per_km: p.alpha_db_per_km(),
            beta2_ps2_per_km: p.beta2 * 1e27,
            gamma_per_w_per_km: p.gamma * 1e3,
            span_length_km: p.span_length / 1e3,
            n_spans: p.n_spans,
            pmd_ps_per_sqrt_km: p.pmd_ps_per_sqrt_km(),
            section_length_km: p.section_length / 1e3,
            noise_figure_db: p.noise_figure_db,
            center_frequency_thz: p.center_frequency / 1e12,
        }
    }

    pub fn to_params(&self) -> FiberParams {
        FiberParams {
            alpha: FiberParams::alpha_from_db_per_km(self.alpha_db_per_km),
            beta2: self.beta2_ps2_per_km / 1e27,
            gamma: self.gamma_per_w_per_km / 1e3,
            span_length: self.span_length_km * 1e3,
            n_spans: self.n_spans,
            pmd_coeff: FiberParams::pmd_from_ps_per_sqrt_km(self.pmd_ps_per_sqrt_km),
            section_length: self.section_length_km * 1e3,
            noise_figure_db: self.noise_figure_db,
            center_frequency: self.center_frequency_thz * 1e12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BurstSection {
    pub n_subcarriers: usize,
    pub burst_duration_ns: f64,
    pub guard_duration_ns: f64,
    pub oversampling: usize,
    pub inft_guard_factor: usize,
    pub modulation: Modulation,
}

impl Default for BurstSection {
    fn default() -> Self {
        let b = BurstConfig::default();
        Self {
            n_subcarriers: b.n_subcarriers,
            burst_duration_ns: b.burst_duration * 1e9,
            guard_duration_ns: b.guard_duration * 1e9,
            oversampling: b.oversampling,
            inft_guard_factor: b.inft_guard_factor,
            modulation: b.modulation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReceiverSection {
    pub decode_gamma: DecodeGamma,
    pub u_map: UMap,
    /// Radius onto which larger received `|q̂|` are pulled (bounded map only).
    pub rx_saturation: f64,
    /// Brick-wall receive filter cutoff as a multiple of half the signal bandwidth.
    pub lowpass_factor: f64,
    pub dbp_steps_per_span: usize,
    /// Leading bursts of each realization used to train the MIMO equalizer
    /// and excluded from the counts.
    pub training_bursts: usize,
}

impl Default for ReceiverSection {
    fn default() -> Self {
        Self {
            decode_gamma: DecodeGamma::Eff,
            u_map: UMap::Bounded,
            rx_saturation: nfdm_core::dsp::NfdmLink::DEFAULT_SATURATION,
            lowpass_factor: 1.1,
            dbp_steps_per_span: 10,
            training_bursts: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub power_dbm: Vec<f64>,
    /// Linear alternative to `power_dbm`.
    pub power_mw: Vec<f64>,
    /// Receiver noise loading targets. Empty means amplifier noise only.
    pub osnr_db: Vec<f64>,
    /// MIMO equalizer lengths. Empty means no equalizer.
    pub taps: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub master_seed: u64,
    pub model: Model,
    pub mode: Mode,
    pub n_polarizations: usize,
    pub n_bursts: usize,
    #[serde(alias = "n_pmd_realizations")]
    pub n_realizations: usize,
    pub step_size_m: f64,
    pub link: LinkSection,
    pub burst: BurstSection,
    pub receiver: ReceiverSection,
    pub sweep: SweepSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment_id: "experiment".into(),
            master_seed: 1,
            model: Model::Lossy,
            mode: Mode::Nfdm,
            n_polarizations: 2,
            n_bursts: 8,
            n_realizations: 20,
            step_size_m: 100.0,
            link: LinkSection::default(),
            burst: BurstSection::default(),
            receiver: ReceiverSection::default(),
            sweep: SweepSection {
                power_dbm: vec![-3.0],
                ..Default::default()
            },
        }
    }
}

/// Reference bandwidth for OSNR, Hz (0.1 nm at 1550 nm).
pub const OSNR_REFERENCE_BANDWIDTH: f64 = 12.5e9;

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn fiber(&self) -> FiberParams {
        self.link.to_params()
    }

    pub fn burst(&self) -> BurstConfig {
        BurstConfig {
            n_subcarriers: self.burst.n_subcarriers,
            burst_duration: self.burst.burst_duration_ns / 1e9,
            guard_duration: self.burst.guard_duration_ns / 1e9,
            oversampling: self.burst.oversampling,
            inft_guard_factor: self.burst.inft_guard_factor,
            modulation: self.burst.modulation,
            n_polarizations: self.n_polarizations,
        }
    }

    /// Sweep powers in dBm, whichever key was used.
    pub fn powers_dbm(&self) -> Vec<f64> {
        if self.sweep.power_mw.is_empty() {
            self.sweep.power_dbm.clone()
        } else {
            self.sweep
                .power_mw
                .iter()
                .map(|p| 10.0 * p.log10())
                .collect()
        }
    }

    /// Fiber the signal actually propagates through under `model`.
    pub fn channel_fiber(&self) -> FiberParams {
        let p = self.fiber();
        match self.model {
            Model::BackToBack | Model::Lossless => FiberParams {
                pmd_coeff: 0.0,
                ..p.lossless()
            },
            Model::TransformedLossless => FiberParams {
                gamma: gamma_eff(p.gamma, p.alpha, p.span_length),
                pmd_coeff: 0.0,
                ..p.lossless()
            },
            Model::Lossy => FiberParams {
                pmd_coeff: 0.0,
                ..p
            },
            Model::LossyPmd => p,
        }
    }

    /// Normalization the NFDM transceiver uses.
    pub fn decode_scales(&self) -> Result<NormalizationScales> {
        let eff = self.model.has_loss() && self.receiver.decode_gamma == DecodeGamma::Eff;
        Ok(normalization_scales(&self.channel_fiber(), eff)?)
    }

    /// Checks every invariant and returns the non-fatal warnings.
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN has to fail too
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        if let Err(e) = self.fiber().validate() {
            errors.push(e.to_string());
        }
        if let Err(e) = self.burst().validate() {
            errors.push(e.to_string());
        }
        let s = &self.sweep;
        if !s.power_dbm.is_empty() && !s.power_mw.is_empty() {
            errors.push("give either sweep.power_dbm or sweep.power_mw, not both".into());
        }
        if s.power_dbm.is_empty() && s.power_mw.is_empty() {
            errors.push("sweep needs at least one launch power".into());
        }
        if s.power_dbm.iter().any(|p| !p.is_finite()) {
            errors.push("sweep.power_dbm values must be finite".into());
        }
        if s.power_mw.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            errors.push("sweep.power_mw values must be positive".into());
        }
        if s.osnr_db.iter().any(|o| !o.is_finite()) {
            errors.push("sweep.osnr_db values must be finite".into());
        }
        if s.taps.contains(&0) {
            errors.push("sweep.taps values must be at least 1".into());
        }
        if self.n_bursts == 0 {
            errors.push("n_bursts must be positive".into());
        }
        if self.n_realizations == 0 {
            errors.push("n_realizations must be positive".into());
        }
        if !(self.step_size_m > 0.0) {
            errors.push("step_size_m must be positive".into());
        }
        if self.model == Model::LossyPmd && self.step_size_m > self.link.section_length_km * 1e3 {
            errors.push("step_size_m must not exceed the PMD section length".into());
        }
        let r = &self.receiver;
        if !(r.rx_saturation > 0.0 && r.rx_saturation < 1.0) {
            errors.push("receiver.rx_saturation must lie in (0, 1)".into());
        }
        if !(r.lowpass_factor > 0.0) {
            errors.push("receiver.lowpass_factor must be positive".into());
        }
        if self.mode == Mode::OfdmDbp && r.dbp_steps_per_span == 0 {
            errors.push("receiver.dbp_steps_per_span must be positive".into());
        }
        if !s.taps.is_empty() && r.training_bursts == 0 {
            errors.push("equalizer taps need receiver.training_bursts ≥ 1".into());
        }
        if !s.taps.is_empty() && r.training_bursts >= self.n_bursts {
            errors.push("n_bursts must exceed receiver.training_bursts".into());
        }
        if self.model != Model::BackToBack && self.decode_scales().is_err() {
            errors.push("normalization needs nonzero dispersion and positive nonlinearity".into());
        }
        if !errors.is_empty() {
            return Err(Error::Config(errors.join("\n")));
        }

        let fiber = self.fiber();
        let burst = self.burst();
        let g = estimate_guard(fiber.beta2, fiber.total_length(), burst.bandwidth());
        if burst.guard_duration < g.delta_t {
            warnings.push(format!(
                "guard {:.2} ns is shorter than the dispersive spread {:.2} ns",
                burst.guard_duration * 1e9,
                g.delta_t * 1e9
            ));
        }
        if self.model == Model::LossyPmd && s.taps.is_empty() {
            warnings.push("lossy+pmd without sweep.taps runs without an equalizer".into());
        }
        if self.model.has_loss()
            && s.osnr_db.is_empty()
            && self.n_realizations == 1
            && self.n_bursts < 4
        {
            warnings.push("few bursts: BER confidence intervals will be wide".into());
        }
        Ok(warnings)
    }

    /// Human-readable table of the resolved physical and normalized values.
    pub fn resolved_table(&self) -> Result<String> {
        let f = self.fiber();
        let c = self.channel_fiber();
        let b = self.burst();
        let g = estimate_guard(f.beta2, f.total_length(), b.bandwidth());
        let mut out = String::new();
        let mut row = |k: &str, v: String| {
            let _ = writeln!(out, "{k:<32} {v}");
        };
        row(
            "experiment",
            format!(
                "{} ({} / {})",
                self.experiment_id,
                self.mode.id(),
                self.model.id()
            ),
        );
        row("polarizations", self.n_polarizations.to_string());
        row(
            "alpha",
            format!("{:.4} dB/km = {:.4e} 1/m", f.alpha_db_per_km(), f.alpha),
        );
        row("beta2", format!("{:.3} ps²/km", f.beta2 * 1e27));
        row("gamma", format!("{:.4} 1/(W·km)", f.gamma * 1e3));
        row(
            "gamma_eff (one span)",
            format!(
                "{:.4} 1/(W·km)",
                gamma_eff(f.gamma, f.alpha, f.span_length) * 1e3
            ),
        );
        row("gamma in channel", format!("{:.4} 1/(W·km)", c.gamma * 1e3));
        row(
            "link",
            format!(
                "{} × {} km = {} km",
                f.n_spans,
                f.span_length / 1e3,
                f.total_length() / 1e3
            ),
        );
        row("span loss", format!("{:.2} dB", f.span_loss_db()));
        row("noise figure", format!("{} dB", f.noise_figure_db));
        row(
            "PMD",
            format!(
                "{} ps/√km, sections {} km",
                f.pmd_ps_per_sqrt_km(),
                f.section_length / 1e3
            ),
        );
        row(
            "subcarriers",
            format!("{} × {}", b.n_subcarriers, b.modulation.id()),
        );
        row("bandwidth", format!("{:.2} GHz", b.bandwidth() / 1e9));
        row(
            "burst rate",
            format!("{:.1} Gbit/s/pol", b.burst_bit_rate() / 1e9),
        );
        row(
            "effective rate",
            format!("{:.1} Gbit/s/pol", b.effective_bit_rate() / 1e9),
        );
        row(
            "burst / guard",
            format!(
                "{} ns / {} ns",
                b.burst_duration * 1e9,
                b.guard_duration * 1e9
            ),
        );
        row(
            "guard estimate",
            format!(
                "{:.2} ns (padded {:.2} ns)",
                g.delta_t * 1e9,
                g.padded * 1e9
            ),
        );
        row(
            "samples per slot / NFT window",
            format!("{} / {}", b.symbol_samples(), b.nft_samples()),
        );
        if self.model != Model::BackToBack || self.mode == Mode::Nfdm {
            let s = self.decode_scales()?;
            row("t0", format!("{:.4} ps", s.t0 * 1e12));
            row(
                "a0",
                format!(
                    "{:.5} √W ({:.3} dBm)",
                    s.a0,
                    10.0 * (s.a0 * s.a0 / 1e-3).log10()
                ),
            );
            row("z0", format!("{} km", s.z0 / 1e3));
            row(
                "normalized distance",
                format!("{}", s.distance(c.total_length())),
            );
            row(
                "normalized NFT window",
                format!("{:.3}", b.nft_samples() as f64 * b.dt() / s.t0),
            );
        }
        row("powers", format!("{:?} dBm", self.powers_dbm()));
        if !self.sweep.osnr_db.is_empty() {
            row("OSNR loading", format!("{:?} dB", self.sweep.osnr_db));
        }
        if !self.sweep.taps.is_empty() {
            row("equalizer taps", format!("{:?}", self.sweep.taps));
        }
        row(
            "bursts × realizations",
            format!("{} × {}", self.n_bursts, self.n_realizations),
        );
        row("step size", format!("{} m", self.step_size_m));
        Ok(out)
    }
}
