//! Library side of the `wigner-orbits` command-line tool.

pub mod compute;
pub mod config;
pub mod error;
pub mod heatmap;
pub mod orbits;
pub mod verify;

pub use error::{CliError, CliResult};
