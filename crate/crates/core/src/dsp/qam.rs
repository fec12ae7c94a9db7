use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BurstConfig, SymbolFrame};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Qam16,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qam16 => 4,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Modulation::Qam16 => "qam16",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "qam16" => Ok(Modulation::Qam16),
            other => Err(Error::Config(format!("unknown constellation '{other}'"))),
        }
    }

    /// All points, indexed by their bit label (MSB first).
    pub fn points(self) -> Vec<Complex64> {
        (0..1usize << self.bits_per_symbol())
            .map(|l| self.point(l))
            .collect()
    }

    fn point(self, label: usize) -> Complex64 {
        match self {
            Modulation::Qam16 => {
                let scale = 1.0 / 10f64.sqrt();
                Complex64::new(gray_level(label >> 2), gray_level(label & 3)) * scale
            }
        }
    }

    fn decide(self, x: Complex64) -> usize {
        match self {
            Modulation::Qam16 => {
                let s = 10f64.sqrt();
                (gray_label(x.re * s) << 2) | gray_label(x.im * s)
            }
        }
    }
}

/// Two Gray-coded bits to a 4-PAM level: 00→−3, 01→−1, 11→1, 10→3.
fn gray_level(bits: usize) -> f64 {
    match bits {
        0b00 => -3.0,
        0b01 => -1.0,
        0b11 => 1.0,
        _ => 3.0,
    }
}

fn gray_label(x: f64) -> usize {
    if x < -2.0 {
        0b00
    } else if x < 0.0 {
        0b01
    } else if x < 2.0 {
        0b11
    } else {
        0b10
    }
}

/// Gray-maps one frame of bits (values 0/1), polarization 1 first.
pub fn map_bits(bits: &[u8], config: &BurstConfig) -> Result<SymbolFrame> {
    let need = config.bits_per_frame();
    if bits.len() != need {
        return Err(Error::Framing(format!(
            "frame needs {need} bits, got {}",
            bits.len()
        )));
    }
    let m = config.modulation;
    let bps = m.bits_per_symbol();
    let mut frame = SymbolFrame::zeros(config);
    for (i, chunk) in bits.chunks(bps).enumerate() {
        let label = chunk
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        frame.symbols[i / config.n_subcarriers][i % config.n_subcarriers] = m.point(label);
    }
    frame.bits = bits.to_vec();
    Ok(frame)
}

/// Minimum-distance decision followed by Gray demapping.
pub fn demap_frame(frame: &SymbolFrame, config: &BurstConfig) -> Result<Vec<u8>> {
    let m = config.modulation;
    let bps = m.bits_per_symbol();
    let mut out = Vec::with_capacity(config.bits_per_frame());
    for pol in 0..config.n_polarizations {
        let s = &frame.symbols[pol];
        if s.len() != config.n_subcarriers {
            return Err(Error::LengthMismatch {
                expected: config.n_subcarriers,
                actual: s.len(),
            });
        }
        for x in s {
            let label = m.decide(*x);
            out.extend((0..bps).rev().map(|b| ((label >> b) & 1) as u8));
        }
    }
    Ok(out)
}
