//! Configuration-driven experiment runner for `lqrpid`.
//!
//! Subcommands read one TOML file, write CSV/JSON artifacts into an output
//! directory and map failures to exit codes (2 configuration, 3 numeric,
//! 1 i/o).

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Command};
pub use config::ExperimentConfig;
pub use error::CliError;
