use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite value while scattering at spectral index {lambda_index}")]
    NumericalOverflow { lambda_index: usize },

    #[error("|a(λ)| = {magnitude:e} below floor at spectral index {lambda_index}")]
    NearZeroDenominator { lambda_index: usize, magnitude: f64 },

    #[error("layer peeling broke down at time index {time_index} (|A| = {magnitude:e})")]
    LayerPeelingBreakdown { time_index: usize, magnitude: f64 },

    #[error("propagation diverged at z = {position_m} m")]
    Divergence { position_m: f64 },

    #[error("|q̂| = {magnitude} outside the invertible region at spectral index {lambda_index}")]
    OutsideUDomain { lambda_index: usize, magnitude: f64 },

    #[error("framing error: {0}")]
    Framing(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("ill-conditioned equalizer training: {0}")]
    IllConditioned(String),

    #[error("Q-factor undefined for BER {0}")]
    UndefinedQ(f64),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("reference power is zero")]
    ZeroReference,

    #[error("signal power must be positive, got {0}")]
    NonPositivePower(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
