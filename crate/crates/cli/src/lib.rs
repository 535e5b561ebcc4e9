//! Command-line layer over `quartic-core`: config loading, subcommand
//! dispatch and result documents.

pub mod commands;
pub mod config;
pub mod document;
pub mod error;

pub use commands::{parse_complex, run_subcommand, Command, RunArgs};
pub use config::{load_config, parse_config, resolve_config_path, ModelConfig, OutputFormat, CONFIG_DIR_ENV};
pub use document::{Amplitude, Check, ErrorRecord, ResultDocument};
pub use error::CliError;
