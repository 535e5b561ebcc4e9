//! Model configuration files.
//!
//! One JSON object per file:
//!
//! ```json
//! {
//!   "eigenvalues": [0.5, 1.0, 2.5],
//!   "multiplicities": [1, 2, 1],
//!   "lambda": 0.05,
//!   "solver": { "tolerance": 1e-12 },
//!   "format": "json"
//! }
//! ```
//!
//! `solver` and `format` are optional; missing solver fields take their defaults.

use std::path::{Path, PathBuf};

use quartic_core::{Error as CoreError, SolverOptions, Spectrum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Directory searched for relative config paths and for the default config.
pub const CONFIG_DIR_ENV: &str = "QUARTIC_CONFIG_DIR";
/// File name used when no `--config` is given.
pub const DEFAULT_CONFIG_NAME: &str = "quartic.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Validated model configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct ModelConfig {
    pub spectrum: Spectrum,
    pub lambda: f64,
    pub solver: SolverOptions,
    pub format: OutputFormat,
}

/// On-disk schema, before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<u32>,
    lambda: f64,
    #[serde(default)]
    solver: SolverOptions,
    #[serde(default)]
    format: OutputFormat,
}

impl TryFrom<RawConfig> for ModelConfig {
    type Error = String;

    fn try_from(raw: RawConfig) -> Result<Self, String> {
        let spectrum = Spectrum::new(raw.eigenvalues, raw.multiplicities).map_err(|e| match e {
            CoreError::InvalidSpectrum(msg) => msg,
            other => other.to_string(),
        })?;
        let config = Self {
            spectrum,
            lambda: raw.lambda,
            solver: raw.solver,
            format: raw.format,
        };
        config.check()?;
        Ok(config)
    }
}

impl From<ModelConfig> for RawConfig {
    fn from(c: ModelConfig) -> Self {
        Self {
            eigenvalues: c.spectrum.eigenvalues().to_vec(),
            multiplicities: c.spectrum.multiplicities().to_vec(),
            lambda: c.lambda,
            solver: c.solver,
            format: c.format,
        }
    }
}

impl ModelConfig {
    pub fn new(spectrum: Spectrum, lambda: f64) -> Result<Self, String> {
        let config = Self {
            spectrum,
            lambda,
            solver: SolverOptions::default(),
            format: OutputFormat::default(),
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), String> {
        if !self.lambda.is_finite() {
            return Err("lambda not finite".into());
        }
        let s = &self.solver;
        if !(s.tolerance > 0.0) || s.max_newton_iters == 0 || s.max_continuation_steps == 0 {
            return Err("solver options must be positive".into());
        }
        if !(s.min_step_fraction > 0.0 && s.min_step_fraction < 1.0) {
            return Err("solver min_step_fraction outside (0, 1)".into());
        }
        Ok(())
    }

    /// Replaces λ, keeping the other fields.
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self, String> {
        self.lambda = lambda;
        self.check()?;
        Ok(self)
    }
}

/// Parses and validates a config from JSON text; `origin` names the source in errors.
pub fn parse_config(text: &str, origin: &str) -> Result<ModelConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: strip_location(&e.to_string()),
    })?;
    ModelConfig::try_from(raw).map_err(|message| CliError::Validation {
        path: origin.to_string(),
        message,
    })
}

/// serde_json appends " at line L column C", which the error already carries.
pub(crate) fn strip_location(message: &str) -> String {
    match message.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => message.to_string(),
    }
}

pub fn load_config(path: &Path) -> Result<ModelConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

/// Chooses the config file: an existing `--config` path as given, otherwise
/// relative to `config_dir`, otherwise `config_dir/quartic.json`.
pub fn resolve_config_path(arg: Option<&Path>, config_dir: Option<&Path>) -> Result<PathBuf, CliError> {
    match (arg, config_dir) {
        (Some(p), _) if p.is_absolute() || p.exists() => Ok(p.to_path_buf()),
        (Some(p), Some(dir)) => Ok(dir.join(p)),
        (Some(p), None) => Ok(p.to_path_buf()),
        (None, Some(dir)) => Ok(dir.join(DEFAULT_CONFIG_NAME)),
        (None, None) => Err(CliError::Usage(format!(
            "no --config given and {CONFIG_DIR_ENV} is not set"
        ))),
    }
}
