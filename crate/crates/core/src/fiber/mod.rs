//! Physical-units fiber channel: normalization, split-step propagation of
//! the Manakov(-PMD) model, lumped amplification and noise loading.

mod amplifier;
mod normalize;
mod params;
mod pmd;
mod ssfm;

pub use amplifier::{edfa_amplify, noise_loading, Edfa, PLANCK};
pub use normalize::{
    denormalize, gamma_eff, normalization_scales, normalize, FieldState, NormalizationScales,
};
pub use params::FiberParams;
pub use pmd::{aggregate_dgd, sample_pmd_realization, PmdRealization, PmdSection};
pub use ssfm::{dbp, ssfm_propagate, Amplification, SsfmOptions};
