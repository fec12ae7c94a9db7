//! On-disk formats: binary signal dumps, PMD realizations as text, symbol
//! frames and bit streams with a JSON-lines sidecar, and records files.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use nfdm_core::dsp::{BurstConfig, SymbolFrame};
use nfdm_core::fiber::{FieldState, PmdRealization, PmdSection};
use nfdm_core::grid::TimeGrid;
use nfdm_core::signal::DualPolSignal;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::Entry;

pub const MAGIC: &[u8; 4] = b"NFDM";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Normalized,
    /// √W on a time axis in seconds.
    Physical,
}

/// Contents of a signal dump.
#[derive(Debug, Clone, PartialEq)]
pub struct Dump {
    pub q1: Vec<Complex64>,
    pub q2: Vec<Complex64>,
    pub grid: TimeGrid,
    pub units: Units,
}

impl Dump {
    pub fn from_signal(s: &DualPolSignal) -> Self {
        Self {
            q1: s.q1.clone(),
            q2: s.q2.clone(),
            grid: s.grid,
            units: Units::Normalized,
        }
    }

    pub fn from_field(f: &FieldState) -> Self {
        Self {
            q1: f.a1.clone(),
            q2: f.a2.clone(),
            grid: f.grid,
            units: Units::Physical,
        }
    }

    pub fn into_signal(self) -> Result<DualPolSignal> {
        Ok(DualPolSignal::new(self.q1, self.q2, self.grid)?)
    }

    pub fn into_field(self) -> Result<FieldState> {
        Ok(FieldState::new(self.q1, self.q2, self.grid)?)
    }

    /// Version 1 for normalized signals, version 2 with the units flag
    /// otherwise.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.q1.len();
        let mut out = Vec::with_capacity(32 + 32 * n);
        out.extend_from_slice(MAGIC);
        let version: u32 = if self.units == Units::Normalized {
            1
        } else {
            2
        };
        out.extend_from_slice(&version.to_le_bytes());
        out.extend_from_slice(&(n as u32).to_le_bytes());
        out.extend_from_slice(&self.grid.dt.to_le_bytes());
        out.extend_from_slice(&self.grid.t_start.to_le_bytes());
        if version == 2 {
            out.extend_from_slice(&1u32.to_le_bytes());
        }
        for x in self.q1.iter().chain(&self.q2) {
            out.extend_from_slice(&x.re.to_le_bytes());
            out.extend_from_slice(&x.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("signal dump: {m}"));
        if b.len() < 28 || &b[..4] != MAGIC {
            return Err(bad("bad magic"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(b[i..i + 4].try_into().unwrap());
        let f64_at = |i: usize| f64::from_le_bytes(b[i..i + 8].try_into().unwrap());
        let version = u32_at(4);
        let n = u32_at(8) as usize;
        let (dt, t_start) = (f64_at(12), f64_at(20));
        let (units, body) = match version {
            1 => (Units::Normalized, 28),
            2 if b.len() >= 32 => match u32_at(28) {
                0 => (Units::Normalized, 32),
                1 => (Units::Physical, 32),
                u => return Err(bad(&format!("unknown units flag {u}"))),
            },
            v => return Err(bad(&format!("unsupported version {v}"))),
        };
        if b.len() != body + 32 * n {
            return Err(bad(&format!(
                "expected {} bytes of samples, found {}",
                32 * n,
                b.len() - body
            )));
        }
        let samples: Vec<Complex64> = (0..2 * n)
            .map(|k| Complex64::new(f64_at(body + 16 * k), f64_at(body + 16 * k + 8)))
            .collect();
        let grid = TimeGrid::new(t_start, n, dt)?;
        Ok(Self {
            q1: samples[..n].to_vec(),
            q2: samples[n..].to_vec(),
            grid,
            units,
        })
    }
}

pub fn write_dump(path: &Path, dump: &Dump) -> Result<()> {
    fs::write(path, dump.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_dump(path: &Path) -> Result<Dump> {
    Dump::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// One section per line: index, θ, φ, phase, DGD in ps, length in m.
pub fn pmd_to_text(pmd: &PmdRealization) -> String {
    let mut s = format!(
        "# seed {}\n# section theta phi phase dgd_ps length_m\n",
        pmd.seed
    );
    for (i, x) in pmd.sections.iter().enumerate() {
        s += &format!(
            "{i} {:e} {:e} {:e} {:e} {:e}\n",
            x.theta,
            x.phi,
            x.phase,
            x.dgd * 1e12,
            x.length
        );
    }
    s
}

pub fn pmd_from_text(text: &str) -> Result<PmdRealization> {
    let mut seed = 0;
    let mut sections = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# seed") {
            seed = rest
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("PMD line {}: bad seed", ln + 1)))?;
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let parse = |k: usize| -> Result<f64> {
            f.get(k).and_then(|v| v.parse().ok()).ok_or_else(|| {
                Error::Config(format!(
                    "PMD line {}: column {} missing or invalid",
                    ln + 1,
                    k + 1
                ))
            })
        };
        if f.len() != 6 || parse(0)? as usize != sections.len() {
            return Err(Error::Config(format!(
                "PMD line {}: expected 6 columns in section order",
                ln + 1
            )));
        }
        sections.push(PmdSection {
            theta: parse(1)?,
            phi: parse(2)?,
            phase: parse(3)?,
            dgd: parse(4)? * 1e-12,
            length: parse(5)?,
        });
    }
    Ok(PmdRealization { sections, seed })
}

pub fn write_pmd(path: &Path, pmd: &PmdRealization) -> Result<()> {
    fs::write(path, pmd_to_text(pmd)).map_err(|e| Error::io(path, e))
}

pub fn read_pmd(path: &Path) -> Result<PmdRealization> {
    pmd_from_text(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// Sidecar line describing a flat binary stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Sidecar {
    Frames {
        n_frames: usize,
        constellation: String,
        burst: BurstConfig,
    },
    Bits {
        n_bits: usize,
        burst: BurstConfig,
    },
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".jsonl");
    PathBuf::from(s)
}

fn write_sidecar(path: &Path, car: &Sidecar) -> Result<()> {
    let p = sidecar_path(path);
    let line = serde_json::to_string(car).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(&p, line + "\n").map_err(|e| Error::io(&p, e))
}

fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let p = sidecar_path(path);
    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    let line = text.lines().next().unwrap_or("");
    serde_json::from_str(line).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
}

/// Frames as interleaved little-endian (re, im) f64, polarization 1 then 2
/// within each frame.
pub fn write_frames(path: &Path, frames: &[SymbolFrame], config: &BurstConfig) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    for fr in frames {
        if fr.symbols.iter().any(|s| s.len() != config.n_subcarriers) {
            return Err(Error::Config(
                "frame length does not match n_subcarriers".into(),
            ));
        }
        for x in fr.symbols.iter().flatten() {
            w.write_all(&x.re.to_le_bytes())
                .and_then(|_| w.write_all(&x.im.to_le_bytes()))
                .map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    write_sidecar(
        path,
        &Sidecar::Frames {
            n_frames: frames.len(),
            constellation: config.modulation.id().to_string(),
            burst: *config,
        },
    )
}

pub fn read_frames(path: &Path) -> Result<(Vec<SymbolFrame>, BurstConfig)> {
    let Sidecar::Frames {
        n_frames, burst, ..
    } = read_sidecar(path)?
    else {
        return Err(Error::Config(format!(
            "{}: sidecar does not describe frames",
            path.display()
        )));
    };
    let b = fs::read(path).map_err(|e| Error::io(path, e))?;
    let m = burst.n_subcarriers;
    if b.len() != n_frames * 2 * m * 16 {
        return Err(Error::Config(format!(
            "{}: size does not match sidecar",
            path.display()
        )));
    }
    let f64_at = |i: usize| f64::from_le_bytes(b[i..i + 8].try_into().unwrap());
    let c = |k: usize| Complex64::new(f64_at(16 * k), f64_at(16 * k + 8));
    let frames = (0..n_frames)
        .map(|f| SymbolFrame {
            symbols: [
                (0..m).map(|k| c((2 * f) * m + k)).collect(),
                (0..m).map(|k| c((2 * f + 1) * m + k)).collect(),
            ],
            bits: Vec::new(),
        })
        .collect();
    Ok((frames, burst))
}

/// Bits one per byte.
pub fn write_bits(path: &Path, bits: &[u8], config: &BurstConfig) -> Result<()> {
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::Config(
            "bit stream holds values other than 0 and 1".into(),
        ));
    }
    fs::write(path, bits).map_err(|e| Error::io(path, e))?;
    write_sidecar(
        path,
        &Sidecar::Bits {
            n_bits: bits.len(),
            burst: *config,
        },
    )
}

pub fn read_bits(path: &Path) -> Result<(Vec<u8>, BurstConfig)> {
    let Sidecar::Bits { n_bits, burst } = read_sidecar(path)? else {
        return Err(Error::Config(format!(
            "{}: sidecar does not describe bits",
            path.display()
        )));
    };
    let b = fs::read(path).map_err(|e| Error::io(path, e))?;
    if b.len() != n_bits || b.iter().any(|&x| x > 1) {
        return Err(Error::Config(format!(
            "{}: bit stream does not match sidecar",
            path.display()
        )));
    }
    Ok((b, burst))
}

pub fn write_records(path: &Path, entries: &[Entry]) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    for e in entries {
        let line = serde_json::to_string(e).map_err(|e| Error::Config(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<Entry>> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::new(k as f64 * 0.25, -(k as f64).sqrt()))
            .collect()
    }

    #[test]
    fn normalized_dump_is_version_one_with_documented_layout() {
        let g = TimeGrid::new(-2.0, 3, 0.5).unwrap();
        let d = Dump {
            q1: ramp(3),
            q2: ramp(3),
            grid: g,
            units: Units::Normalized,
        };
        let b = d.to_bytes();
        assert_eq!(&b[..4], b"NFDM");
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(b[12..20].try_into().unwrap()), 0.5);
        assert_eq!(f64::from_le_bytes(b[20..28].try_into().unwrap()), -2.0);
        assert_eq!(b.len(), 28 + 3 * 32);
        // q2[0] follows the last sample of q1
        assert_eq!(
            f64::from_le_bytes(b[28 + 48..28 + 56].try_into().unwrap()),
            0.0
        );
        assert_eq!(Dump::from_bytes(&b).unwrap(), d);
    }

    #[test]
    fn physical_dump_carries_units_flag() {
        let g = TimeGrid::new(0.0, 4, 1e-12).unwrap();
        let d = Dump {
            q1: ramp(4),
            q2: ramp(4),
            grid: g,
            units: Units::Physical,
        };
        let b = d.to_bytes();
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 2);
        assert_eq!(Dump::from_bytes(&b).unwrap(), d);
    }

    #[test]
    fn corrupt_dumps_are_rejected() {
        let g = TimeGrid::new(0.0, 4, 1.0).unwrap();
        let b = Dump {
            q1: ramp(4),
            q2: ramp(4),
            grid: g,
            units: Units::Normalized,
        }
        .to_bytes();
        assert!(Dump::from_bytes(&b[..b.len() - 1]).is_err());
        let mut m = b.clone();
        m[0] = b'X';
        assert!(Dump::from_bytes(&m).is_err());
        let mut v = b;
        v[4] = 9;
        assert!(Dump::from_bytes(&v).is_err());
    }

    #[test]
    fn pmd_text_round_trip() {
        let pmd = PmdRealization {
            sections: (0..3)
                .map(|i| PmdSection {
                    theta: 0.1 * i as f64,
                    phi: -1.5,
                    phase: 3.0,
                    dgd: 1.234567890123e-13 * i as f64,
                    length: 1000.0,
                })
                .collect(),
            seed: 99,
        };
        let back = pmd_from_text(&pmd_to_text(&pmd)).unwrap();
        assert_eq!(back.seed, 99);
        for (a, b) in back.sections.iter().zip(&pmd.sections) {
            assert_eq!(
                (a.theta, a.phi, a.phase, a.length),
                (b.theta, b.phi, b.phase, b.length)
            );
            assert!((a.dgd - b.dgd).abs() <= 1e-15 * b.dgd.abs().max(1e-30));
        }
        assert!(pmd_from_text("0 1 2 3\n").is_err());
    }
}
