use std::f64::consts::PI;

use super::BurstConfig;
use crate::error::{Error, Result};
use crate::fiber::FieldState;
use crate::grid::TimeGrid;

/// Dispersive memory of a link and the guard time with a 20% margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardEstimate {
    pub delta_t: f64,
    pub padded: f64,
}

/// `ΔT = 2π|β₂|·L·B`.
pub fn estimate_guard(beta2: f64, total_length: f64, bandwidth: f64) -> GuardEstimate {
    let delta_t = 2.0 * PI * beta2.abs() * total_length * bandwidth;
    GuardEstimate {
        delta_t,
        padded: 1.2 * delta_t,
    }
}

/// Concatenates symbol slots into one stream.
pub fn frame_bursts(bursts: &[FieldState]) -> Result<FieldState> {
    let first = bursts
        .first()
        .ok_or_else(|| Error::Framing("no bursts to frame".into()))?;
    let slot = first.a1.len();
    let mut a1 = Vec::with_capacity(slot * bursts.len());
    let mut a2 = Vec::with_capacity(slot * bursts.len());
    for b in bursts {
        if b.a1.len() != slot || b.grid.dt != first.grid.dt {
            return Err(Error::LengthMismatch {
                expected: slot,
                actual: b.a1.len(),
            });
        }
        a1.extend_from_slice(&b.a1);
        a2.extend_from_slice(&b.a2);
    }
    let grid = TimeGrid::new(first.grid.t_start, a1.len(), first.grid.dt)?;
    Ok(FieldState {
        a1,
        a2,
        grid,
        position: first.position,
    })
}

/// Cuts a stream back into symbol slots at the known boundaries.
pub fn split_bursts(field: &FieldState, config: &BurstConfig) -> Result<Vec<FieldState>> {
    let slot = config.symbol_samples();
    if field.a1.is_empty() || !field.a1.len().is_multiple_of(slot) {
        return Err(Error::LengthMismatch {
            expected: slot * (field.a1.len() / slot).max(1),
            actual: field.a1.len(),
        });
    }
    let grid = config.symbol_grid()?;
    Ok(field
        .a1
        .chunks(slot)
        .zip(field.a2.chunks(slot))
        .map(|(a1, a2)| FieldState {
            a1: a1.to_vec(),
            a2: a2.to_vec(),
            grid,
            position: field.position,
        })
        .collect())
}
