//! Named experiment sets reproducing each figure study. The plain names are
//! desk scale; the `-full` variants use full-scale counts and steps.

use crate::config::{DecodeGamma, ExperimentConfig, Mode, Model, SweepSection};
use crate::plot::{PlotKind, PlotSpec, Selection};

pub const PRESET_NAMES: [&str; 10] = [
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "fig7",
    "fig3-full",
    "fig4-full",
    "fig5-full",
    "fig6-full",
    "fig7-full",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub experiments: Vec<ExperimentConfig>,
    pub plots: Vec<PlotSpec>,
}

#[derive(Clone, Copy)]
struct Scale {
    full: bool,
}

impl Scale {
    fn base(self, id: &str) -> ExperimentConfig {
        let mut c = ExperimentConfig {
            experiment_id: id.into(),
            n_bursts: if self.full { 64 } else { 8 },
            n_realizations: 1,
            step_size_m: if self.full { 100.0 } else { 500.0 },
            ..Default::default()
        };
        if !self.full {
            c.burst.oversampling = 2;
        }
        c
    }

    fn pick<T>(self, desk: T, full: T) -> T {
        if self.full {
            full
        } else {
            desk
        }
    }
}

fn range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

fn plot(kind: PlotKind, output: &str, title: &str) -> PlotSpec {
    PlotSpec {
        kind,
        output: output.into(),
        title: Some(title.into()),
        select: Selection::default(),
    }
}

/// BER against receiver-loaded OSNR at −3.1 dBm for the four channel models,
/// with the lossy link decoded both ways.
fn fig3(s: Scale) -> Preset {
    let osnr = s.pick(range(12.0, 24.0, 2.0), range(10.0, 26.0, 1.0));
    let cases = [
        ("b2b", Model::BackToBack, DecodeGamma::Eff),
        ("lossless", Model::Lossless, DecodeGamma::Eff),
        ("lossy-gamma-eff", Model::Lossy, DecodeGamma::Eff),
        ("lossy-gamma", Model::Lossy, DecodeGamma::Plain),
        (
            "transformed-lossless",
            Model::TransformedLossless,
            DecodeGamma::Eff,
        ),
    ];
    let experiments = cases
        .iter()
        .map(|&(id, model, g)| {
            let mut c = s.base(id);
            c.model = model;
            c.receiver.decode_gamma = g;
            c.sweep = SweepSection {
                power_dbm: vec![-3.1],
                osnr_db: osnr.clone(),
                ..Default::default()
            };
            c
        })
        .collect();
    Preset {
        name: String::new(),
        experiments,
        plots: vec![plot(PlotKind::BerVsOsnr, "fig3", "NFDM BER vs OSNR")],
    }
}

/// Dual- against single-polarization NFDM over the lossy link.
fn fig4(s: Scale) -> Preset {
    let experiments = [(2, "nfdm-2pol"), (1, "nfdm-1pol")]
        .iter()
        .map(|&(npol, id)| {
            let mut c = s.base(id);
            c.n_polarizations = npol;
            c.sweep.power_dbm = s.pick(range(-12.0, 6.0, 2.0), range(-14.0, 8.0, 1.0));
            c
        })
        .collect();
    Preset {
        name: String::new(),
        experiments,
        plots: vec![plot(
            PlotKind::QVsPower,
            "fig4",
            "NFDM, 1 vs 2 polarizations",
        )],
    }
}

/// NFDM against OFDM with CD compensation and with 10-step DBP.
fn fig5(s: Scale) -> Preset {
    let experiments = [
        (Mode::Nfdm, "nfdm"),
        (Mode::Ofdm, "ofdm"),
        (Mode::OfdmDbp, "ofdm-dbp"),
    ]
    .iter()
    .map(|&(mode, id)| {
        let mut c = s.base(id);
        c.mode = mode;
        c.sweep.power_dbm = s.pick(range(-9.0, 9.0, 2.0), range(-12.0, 10.0, 1.0));
        c
    })
    .collect();
    Preset {
        name: String::new(),
        experiments,
        plots: vec![plot(PlotKind::QVsPower, "fig5", "PDM-NFDM vs PDM-OFDM")],
    }
}

fn pmd_case(s: Scale, id: &str, d_pmd: f64) -> ExperimentConfig {
    let mut c = s.base(id);
    c.model = Model::LossyPmd;
    c.link.pmd_ps_per_sqrt_km = d_pmd;
    c.n_realizations = s.pick(20, 120);
    c
}

/// Q against equalizer length at 0.5 dBm.
fn fig6(s: Scale) -> Preset {
    let taps = s.pick(vec![1, 2, 3, 5, 7, 9, 13, 17, 25], (1..=31).collect());
    let experiments = [0.0, 0.1, 0.2, 0.5]
        .iter()
        .map(|&d| {
            let mut c = pmd_case(s, &format!("pmd-{d}"), d);
            c.sweep = SweepSection {
                power_dbm: vec![0.5],
                taps: taps.clone(),
                ..Default::default()
            };
            c
        })
        .collect();
    Preset {
        name: String::new(),
        experiments,
        plots: vec![plot(PlotKind::QVsTaps, "fig6", "Q vs equalizer taps")],
    }
}

/// Q against power with PMD, the tap counts of each PMD value, and the
/// reference without any birefringence.
fn fig7(s: Scale) -> Preset {
    let powers = s.pick(range(-6.0, 6.0, 2.0), range(-8.0, 8.0, 1.0));
    // the desk grid is far coarser, so the same delay spread needs fewer taps
    let taps = s.pick([(0.0, 1), (0.2, 3), (0.5, 7)], [(0.0, 13), (0.2, 25), (0.5, 61)]);
    let mut experiments: Vec<ExperimentConfig> = taps
        .iter()
        .map(|&(d, taps)| {
            let mut c = pmd_case(s, &format!("pmd-{d}"), d);
            c.sweep = SweepSection {
                power_dbm: powers.clone(),
                taps: vec![taps],
                ..Default::default()
            };
            c
        })
        .collect();
    let mut reference = s.base("no-birefringence");
    reference.sweep.power_dbm = powers;
    experiments.push(reference);
    Preset {
        name: String::new(),
        experiments,
        plots: vec![plot(PlotKind::QVsPower, "fig7", "PMD impact on PDM-NFDM")],
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    let (fig, full) = match name.strip_suffix("-full") {
        Some(f) => (f, true),
        None => (name, false),
    };
    let s = Scale { full };
    let mut p = match fig {
        "fig3" => fig3(s),
        "fig4" => fig4(s),
        "fig5" => fig5(s),
        "fig6" => fig6(s),
        "fig7" => fig7(s),
        _ => return None,
    };
    p.name = name.to_string();
    for (i, c) in p.experiments.iter_mut().enumerate() {
        c.master_seed = 1000 + i as u64;
    }
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            assert!(!p.experiments.is_empty());
            for c in &p.experiments {
                c.validate()
                    .unwrap_or_else(|e| panic!("{name}/{}: {e}", c.experiment_id));
            }
        }
        assert!(preset("fig8").is_none());
    }

    #[test]
    fn full_scale_is_larger() {
        let d = preset("fig7").unwrap();
        let p = preset("fig7-full").unwrap();
        assert_eq!(d.experiments[0].n_realizations, 20);
        assert_eq!(p.experiments[0].n_realizations, 120);
        assert!(p.experiments[0].step_size_m < d.experiments[0].step_size_m);
    }
}
