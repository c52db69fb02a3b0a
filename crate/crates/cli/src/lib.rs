//! Library half of the `magnoncat` command line tool: configuration,
//! file formats and the four workflows.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use config::{Preset, RunConfig};
pub use error::{exit, CliError, CliResult};
