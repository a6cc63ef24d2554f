//! Command-line driver, file formats and parallel orchestration for
//! `moustache-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod oracles;
pub mod parallel;
pub mod suite;

pub use config::{ExperimentConfig, OutputFormat};
pub use error::{AppError, AppResult};
