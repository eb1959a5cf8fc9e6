//! Command-line front end for the spectraplex library: structured game
//! files, experiment orchestration, CSV emission, and reproducibility
//! manifests.
//!
//! The binary is `spectraplex`; this library exposes the same commands so
//! tests and other tools can drive them in-process.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod gamefile;

pub use error::{CliError, Result};
