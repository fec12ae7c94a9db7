//! Link quality metrics and PMD statistics.

mod ber;
mod maxwell;
mod signal_quality;

pub use ber::{ber, q_from_ber, BerRecord};
pub use maxwell::{
    coverage_interval, maxwell_cdf, maxwell_fit, outage_probability, required_taps, MaxwellFit,
};
pub use signal_quality::{evm, evm_frames, osnr, EvmMode};
