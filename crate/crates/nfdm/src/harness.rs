//! Sweep orchestration: one job per (launch power, realization), fanned out
//! over a rayon pool. Each job owns a seeded stream, propagates once, and
//! evaluates every OSNR and equalizer length of the sweep on that field.

use nfdm_core::dsp::{
    apply_equalizer, cd_compensate, dbp, demap_frame, frame_bursts, lowpass, map_bits,
    nfdm_modulate, nfdm_rx_pseudo, nfdm_tx_pseudo, ofdm_demodulate, ofdm_modulate,
    pseudo_burst_range, pseudo_to_frame, split_bursts, train_equalizer, BurstConfig, EqualizerTaps,
    NfdmLink, SymbolFrame,
};
use nfdm_core::fiber::{
    noise_loading, sample_pmd_realization, ssfm_propagate, Amplification, FiberParams, FieldState,
    NormalizationScales, SsfmOptions,
};
use nfdm_core::metrics::{ber, evm_frames, osnr, BerRecord, EvmMode};
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mode, Model, OSNR_REFERENCE_BANDWIDTH};
use crate::error::{Error, Result};

/// Outcome of one realization at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment_id: String,
    pub mode: Mode,
    pub model: Model,
    pub n_polarizations: usize,
    pub realization: usize,
    pub seed: u64,
    pub power_dbm: f64,
    pub osnr_db: Option<f64>,
    pub n_taps: Option<usize>,
    pub bits_compared: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub q_db: Option<f64>,
    pub evm_db: Option<f64>,
    /// OSNR read off the received spectrum.
    pub osnr_measured_db: Option<f64>,
    pub error: Option<String>,
}

/// Pooled counts of all successful realizations at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub experiment_id: String,
    pub mode: Mode,
    pub model: Model,
    pub n_polarizations: usize,
    pub power_dbm: f64,
    pub osnr_db: Option<f64>,
    pub n_taps: Option<usize>,
    pub bits_compared: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub q_db: Option<f64>,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean EVM power over realizations, dB.
    pub evm_db: Option<f64>,
    pub n_ok: usize,
    pub n_failed: usize,
}

/// One line of a records file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Entry {
    Realization(Record),
    Aggregate(Aggregate),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutput {
    pub records: Vec<Record>,
    pub aggregates: Vec<Aggregate>,
}

impl RunOutput {
    /// Records first, then aggregates, in sweep order.
    pub fn entries(&self) -> Vec<Entry> {
        self.records
            .iter()
            .cloned()
            .map(Entry::Realization)
            .chain(self.aggregates.iter().cloned().map(Entry::Aggregate))
            .collect()
    }

    pub fn from_entries(entries: Vec<Entry>) -> Self {
        let mut out = RunOutput::default();
        for e in entries {
            match e {
                Entry::Realization(r) => out.records.push(r),
                Entry::Aggregate(a) => out.aggregates.push(a),
            }
        }
        out
    }
}

/// Seed of realization stream `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Worker count from `NFDM_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("NFDM_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    run_experiment_with_threads(config, threads_from_env())
}

pub fn run_experiment_with_threads(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<RunOutput> {
    config.validate()?;
    let plan = Plan::new(config)?;
    let powers = config.powers_dbm();
    let jobs: Vec<(usize, usize)> = (0..powers.len())
        .flat_map(|p| (0..config.n_realizations).map(move |r| (p, r)))
        .collect();
    let run = || -> Vec<Vec<Record>> {
        jobs.par_iter()
            .map(|&(p, r)| {
                let seed = derive_seed(config.master_seed, (p * config.n_realizations + r) as u64);
                plan.run_job(powers[p], r, seed)
            })
            .collect()
    };
    let per_job = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let records: Vec<Record> = per_job.into_iter().flatten().collect();
    let aggregates = aggregate(&records);
    Ok(RunOutput {
        records,
        aggregates,
    })
}

/// Groups records by sweep point in first-seen order and pools the counts.
pub fn aggregate(records: &[Record]) -> Vec<Aggregate> {
    type Key = (String, Mode, Model, usize, u64, Option<u64>, Option<usize>);
    let key = |r: &Record| -> Key {
        (
            r.experiment_id.clone(),
            r.mode,
            r.model,
            r.n_polarizations,
            r.power_dbm.to_bits(),
            r.osnr_db.map(f64::to_bits),
            r.n_taps,
        )
    };
    let mut keys: Vec<Key> = Vec::new();
    for r in records {
        let k = key(r);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|k| {
            let group: Vec<&Record> = records.iter().filter(|r| key(r) == k).collect();
            let ok: Vec<&&Record> = group.iter().filter(|r| r.error.is_none()).collect();
            let (errors, bits) = ok
                .iter()
                .fold((0, 0), |(e, b), r| (e + r.bit_errors, b + r.bits_compared));
            let pooled = BerRecord::from_counts(errors, bits).ok();
            let evms: Vec<f64> = ok
                .iter()
                .filter_map(|r| r.evm_db)
                .map(|e| 10f64.powf(e / 10.0))
                .collect();
            let first = group[0];
            Aggregate {
                experiment_id: first.experiment_id.clone(),
                mode: first.mode,
                model: first.model,
                n_polarizations: first.n_polarizations,
                power_dbm: first.power_dbm,
                osnr_db: first.osnr_db,
                n_taps: first.n_taps,
                bits_compared: bits,
                bit_errors: errors,
                ber: pooled.map_or(f64::NAN, |p| p.ber),
                q_db: pooled.and_then(|p| p.q_db),
                ci_low: pooled.map_or(f64::NAN, |p| p.ci_low),
                ci_high: pooled.map_or(f64::NAN, |p| p.ci_high),
                evm_db: (!evms.is_empty())
                    .then(|| 10.0 * (evms.iter().sum::<f64>() / evms.len() as f64).log10()),
                n_ok: ok.len(),
                n_failed: group.len() - ok.len(),
            }
        })
        .collect()
}

/// Everything a job needs that does not depend on the launch power.
struct Plan<'a> {
    config: &'a ExperimentConfig,
    burst: BurstConfig,
    fiber: FiberParams,
    distance: f64,
    training: usize,
    scales: NormalizationScales,
}

/// Received signal after the front end, one entry per burst.
enum FrontEnd {
    /// U-domain pseudo-time waveforms on the NFT window.
    Nfdm(Vec<[Vec<Complex64>; 2]>),
    /// Dispersion-compensated slots, scaled to unit burst power.
    Ofdm(Vec<[Vec<Complex64>; 2]>),
}

fn dbm_to_w(p: f64) -> f64 {
    1e-3 * 10f64.powf(p / 10.0)
}

impl<'a> Plan<'a> {
    fn new(config: &'a ExperimentConfig) -> Result<Self> {
        let fiber = config.channel_fiber();
        let distance = if config.model == Model::BackToBack {
            0.0
        } else {
            fiber.total_length()
        };
        let training = if config.sweep.taps.is_empty() {
            0
        } else {
            config.receiver.training_bursts
        };
        Ok(Self {
            config,
            burst: config.burst(),
            fiber,
            distance,
            training,
            scales: config.decode_scales()?,
        })
    }

    fn link(&self, power_dbm: f64) -> NfdmLink {
        let mut link = NfdmLink::new(self.scales, dbm_to_w(power_dbm), self.distance);
        link.rx_saturation = self.config.receiver.rx_saturation;
        link.u_map = self.config.receiver.u_map;
        link
    }

    fn ofdm_amplitude(&self, power_dbm: f64) -> f64 {
        (dbm_to_w(power_dbm) / self.burst.n_polarizations as f64).sqrt()
    }

    fn run_job(&self, power_dbm: f64, realization: usize, seed: u64) -> Vec<Record> {
        let c = self.config;
        let osnrs: Vec<Option<f64>> = if c.sweep.osnr_db.is_empty() {
            vec![None]
        } else {
            c.sweep.osnr_db.iter().copied().map(Some).collect()
        };
        let taps: Vec<Option<usize>> = if c.sweep.taps.is_empty() {
            vec![None]
        } else {
            c.sweep.taps.iter().copied().map(Some).collect()
        };
        let blank = |osnr_db: Option<f64>, n_taps: Option<usize>| Record {
            experiment_id: c.experiment_id.clone(),
            mode: c.mode,
            model: c.model,
            n_polarizations: c.n_polarizations,
            realization,
            seed,
            power_dbm,
            osnr_db,
            n_taps,
            bits_compared: 0,
            bit_errors: 0,
            ber: f64::NAN,
            q_db: None,
            evm_db: None,
            osnr_measured_db: None,
            error: None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prepared = self.transmit_and_propagate(power_dbm, seed, &mut rng);
        let (bits, frames, rx) = match prepared {
            Ok(x) => x,
            Err(e) => {
                let msg = e.to_string();
                return osnrs
                    .iter()
                    .flat_map(|&o| taps.iter().map(move |&t| (o, t)))
                    .map(|(o, t)| Record {
                        error: Some(msg.clone()),
                        ..blank(o, t)
                    })
                    .collect();
            }
        };
        let mut out = Vec::new();
        for &o in &osnrs {
            let front = self.receive_front(&rx, power_dbm, o, &mut rng);
            for &t in &taps {
                let mut rec = blank(o, t);
                match front.as_ref().map_err(Clone::clone).and_then(|(f, m)| {
                    rec.osnr_measured_db = *m;
                    self.decide(f, &frames, &bits, power_dbm, t)
                }) {
                    Ok((counts, evm_db)) => {
                        rec.bits_compared = counts.bits_compared;
                        rec.bit_errors = counts.bit_errors;
                        rec.ber = counts.ber;
                        rec.q_db = counts.q_db;
                        rec.evm_db = evm_db;
                    }
                    Err(e) => rec.error = Some(e.to_string()),
                }
                out.push(rec);
            }
        }
        out
    }

    #[allow(clippy::type_complexity)]
    fn transmit_and_propagate(
        &self,
        power_dbm: f64,
        seed: u64,
        rng: &mut ChaCha8Rng,
    ) -> nfdm_core::Result<(Vec<Vec<u8>>, Vec<SymbolFrame>, FieldState)> {
        let c = self.config;
        let b = &self.burst;
        let bits: Vec<Vec<u8>> = (0..c.n_bursts)
            .map(|_| {
                (0..b.bits_per_frame())
                    .map(|_| rng.random_range(0..2u8))
                    .collect()
            })
            .collect();
        let frames = bits
            .iter()
            .map(|x| map_bits(x, b))
            .collect::<nfdm_core::Result<Vec<_>>>()?;
        let tx: Vec<FieldState> = match c.mode {
            Mode::Nfdm => {
                let link = self.link(power_dbm);
                frames
                    .iter()
                    .map(|f| nfdm_modulate(f, b, &link))
                    .collect::<nfdm_core::Result<_>>()?
            }
            Mode::Ofdm | Mode::OfdmDbp => {
                let amp = self.ofdm_amplitude(power_dbm);
                frames
                    .iter()
                    .map(|f| ofdm_modulate(f, b).map(|w| w.scaled(amp)))
                    .collect::<nfdm_core::Result<_>>()?
            }
        };
        let signal = frame_bursts(&tx)?;
        if c.model == Model::BackToBack {
            return Ok((bits, frames, signal));
        }
        let amplification = if !c.model.has_loss() {
            Amplification::Off
        } else if c.sweep.osnr_db.is_empty() {
            Amplification::Ase
        } else {
            Amplification::Noiseless
        };
        let pmd =
            (c.model == Model::LossyPmd).then(|| sample_pmd_realization(&self.fiber, seed, rng));
        let opts = SsfmOptions {
            step_size: c.step_size_m,
            amplification,
        };
        let rx = ssfm_propagate(&signal, &self.fiber, pmd.as_ref(), rng, &opts)?;
        Ok((bits, frames, rx))
    }

    fn receive_front(
        &self,
        rx: &FieldState,
        power_dbm: f64,
        osnr_db: Option<f64>,
        rng: &mut ChaCha8Rng,
    ) -> std::result::Result<(FrontEnd, Option<f64>), nfdm_core::Error> {
        let b = &self.burst;
        let noisy = match osnr_db {
            Some(o) => noise_loading(rx, o, OSNR_REFERENCE_BANDWIDTH, rng)?,
            None => rx.clone(),
        };
        let measured = osnr(&noisy, b.bandwidth(), OSNR_REFERENCE_BANDWIDTH)
            .ok()
            .filter(|x| x.is_finite());
        let filtered = lowpass(
            &noisy,
            self.config.receiver.lowpass_factor * b.bandwidth() / 2.0,
        );
        let front = match self.config.mode {
            Mode::Nfdm => {
                let link = self.link(power_dbm);
                let bursts = split_bursts(&filtered, b)?;
                // out-of-band noise would otherwise pull the LS taps toward zero
                let cutoff = self.config.receiver.lowpass_factor * b.bandwidth() / 2.0;
                let grid = b.nft_grid()?;
                let pseudo = bursts
                    .iter()
                    .map(|w| {
                        let [x1, x2] = nfdm_rx_pseudo(w, b, &link)?;
                        let f = lowpass(&FieldState::new(x1, x2, grid)?, cutoff);
                        Ok([f.a1, f.a2])
                    })
                    .collect::<nfdm_core::Result<_>>()?;
                FrontEnd::Nfdm(pseudo)
            }
            Mode::Ofdm | Mode::OfdmDbp => {
                let comp = if self.distance == 0.0 {
                    filtered
                } else if self.config.mode == Mode::OfdmDbp {
                    dbp(
                        &filtered,
                        &self.fiber,
                        self.config.receiver.dbp_steps_per_span,
                    )?
                } else {
                    cd_compensate(&filtered, self.fiber.beta2, self.distance)
                };
                let inv = 1.0 / self.ofdm_amplitude(power_dbm);
                FrontEnd::Ofdm(
                    split_bursts(&comp, b)?
                        .into_iter()
                        .map(|w| [scale(&w.a1, inv), scale(&w.a2, inv)])
                        .collect(),
                )
            }
        };
        Ok((front, measured))
    }

    /// Equalizes (when `n_taps` is set), decides, and counts over the
    /// non-training bursts.
    fn decide(
        &self,
        front: &FrontEnd,
        frames: &[SymbolFrame],
        bits: &[Vec<u8>],
        power_dbm: f64,
        n_taps: Option<usize>,
    ) -> nfdm_core::Result<(BerRecord, Option<f64>)> {
        let b = &self.burst;
        let (waves, amplitude) = match front {
            FrontEnd::Nfdm(w) => (w, self.link(power_dbm).amplitude(b)),
            FrontEnd::Ofdm(w) => (w, 1.0),
        };
        let reference = |f: &SymbolFrame| -> nfdm_core::Result<[Vec<Complex64>; 2]> {
            match front {
                FrontEnd::Nfdm(_) => nfdm_tx_pseudo(f, b, amplitude),
                FrontEnd::Ofdm(_) => ofdm_modulate(f, b).map(|w| [w.a1, w.a2]),
            }
        };
        let taps = match n_taps {
            Some(n) => Some(self.train(waves, frames, &reference, n)?),
            None => None,
        };
        let mut rx_frames = Vec::new();
        let mut tx_bits = Vec::new();
        let mut rx_bits = Vec::new();
        for (k, w) in waves.iter().enumerate().skip(self.training) {
            let eq;
            let w = match &taps {
                Some(t) => {
                    eq = apply_equalizer(t, [&w[0], &w[1]]);
                    &eq
                }
                None => w,
            };
            let f = match front {
                FrontEnd::Nfdm(_) => pseudo_to_frame([&w[0], &w[1]], b, amplitude)?,
                FrontEnd::Ofdm(_) => ofdm_demodulate(
                    &FieldState::new(w[0].clone(), w[1].clone(), b.symbol_grid()?)?,
                    b,
                )?,
            };
            tx_bits.extend_from_slice(&bits[k]);
            rx_bits.extend(demap_frame(&f, b)?);
            rx_frames.push(f);
        }
        let counts = ber(&tx_bits, &rx_bits)?;
        let evm_db = evm_frames(&frames[self.training..], &rx_frames, b, EvmMode::Absolute).ok();
        Ok((counts, evm_db))
    }

    fn train(
        &self,
        waves: &[[Vec<Complex64>; 2]],
        frames: &[SymbolFrame],
        reference: &dyn Fn(&SymbolFrame) -> nfdm_core::Result<[Vec<Complex64>; 2]>,
        n_taps: usize,
    ) -> nfdm_core::Result<EqualizerTaps> {
        // Only the burst and a margin of one filter length enter the fit. The
        // rest of the NFT window is noise over a zero reference, which biases
        // the taps toward zero.
        let len = waves.first().map_or(0, |w| w[0].len());
        let rows = match self.config.mode {
            Mode::Nfdm => {
                let r = pseudo_burst_range(&self.burst);
                r.start.saturating_sub(n_taps)..(r.end + n_taps).min(len)
            }
            Mode::Ofdm | Mode::OfdmDbp => 0..len,
        };
        let (mut t1, mut t2, mut r1, mut r2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (w, f) in waves.iter().zip(frames).take(self.training) {
            let [x1, x2] = reference(f)?;
            t1.extend_from_slice(&x1[rows.clone()]);
            t2.extend_from_slice(&x2[rows.clone()]);
            r1.extend_from_slice(&w[0][rows.clone()]);
            r2.extend_from_slice(&w[1][rows.clone()]);
        }
        let len = t1.len();
        train_equalizer([&t1, &t2], [&r1, &r2], n_taps, 0..len)
    }
}

fn scale(x: &[Complex64], c: f64) -> Vec<Complex64> {
    x.iter().map(|v| v * c).collect()
}
