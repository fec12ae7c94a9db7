pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod io;
pub mod plot;
pub mod presets;

pub use error::{Error, Result};
