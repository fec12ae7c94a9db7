use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub bits_compared: u64,
    pub bit_errors: u64,
    pub ber: f64,
    /// `None` where the Q-factor is undefined (no errors, or BER ≥ 0.5).
    pub q_db: Option<f64>,
    /// Wilson score interval at 95%.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BerRecord {
    pub fn from_counts(bit_errors: u64, bits_compared: u64) -> Result<Self> {
        if bits_compared == 0 || bit_errors > bits_compared {
            return Err(Error::LengthMismatch {
                expected: bits_compared as usize,
                actual: bit_errors as usize,
            });
        }
        let n = bits_compared as f64;
        let p = bit_errors as f64 / n;
        let z = 1.959_963_984_540_054;
        let denom = 1.0 + z * z / n;
        let centre = (p + z * z / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
        Ok(Self {
            bits_compared,
            bit_errors,
            ber: p,
            q_db: q_from_ber(p).ok(),
            ci_low: if bit_errors == 0 {
                0.0
            } else {
                (centre - half).max(0.0)
            },
            ci_high: if bit_errors == bits_compared {
                1.0
            } else {
                (centre + half).min(1.0)
            },
        })
    }

    /// Pools two records over disjoint bit sets.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        Self::from_counts(
            self.bit_errors + other.bit_errors,
            self.bits_compared + other.bits_compared,
        )
    }
}

pub fn ber(tx: &[u8], rx: &[u8]) -> Result<BerRecord> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            expected: tx.len(),
            actual: rx.len(),
        });
    }
    let errors = tx
        .iter()
        .zip(rx)
        .filter(|(a, b)| (*a & 1) != (*b & 1))
        .count();
    BerRecord::from_counts(errors as u64, tx.len() as u64)
}

/// Gaussian-equivalent Q-factor, `20·log₁₀(√2·erfc⁻¹(2·BER))`.
pub fn q_from_ber(ber: f64) -> Result<f64> {
    if !(ber > 0.0 && ber < 0.5) {
        return Err(Error::UndefinedQ(ber));
    }
    Ok(20.0 * (2f64.sqrt() * erfc_inv(2.0 * ber)).log10())
}
