//! Numerical core for polarization-multiplexed nonlinear frequency-division
//! multiplexing: the vector NFT/INFT, a Manakov fiber channel with loss,
//! lumped amplification and PMD, the NFDM/OFDM transceiver DSP chain, and
//! link quality metrics.

// NaN must fail the `!(x > 0.0)` guards, and index loops read better in
// the matrix code.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dsp;
pub mod error;
pub mod fft;
pub mod fiber;
pub mod grid;
pub mod metrics;
pub mod nft;
pub mod signal;

pub use error::{Error, Result};
pub use grid::{SpectralGrid, TimeGrid};
pub use signal::DualPolSignal;
