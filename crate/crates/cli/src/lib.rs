//! Library half of the `privgraph` command: run-config parsing and the
//! command implementations, kept separate from argument parsing so tests
//! can drive them directly.

pub mod commands;
pub mod config;
pub mod error;

pub use config::RunConfig;
pub use error::{exit_code, CliError, CliResult};
