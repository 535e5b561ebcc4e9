//! Result documents: JSON for archiving, CSV for tabulated values.

use std::collections::BTreeMap;

use num_complex::Complex64;
use quartic_core::DeformedSpectrum;
use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::error::CliError;

pub const TOOL_NAME: &str = "quartic";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex numbers are stored as `[re, im]`.
pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub name: String,
    pub z: Option<[f64; 2]>,
    pub w: Option<[f64; 2]>,
    pub value: [f64; 2],
    /// Dyson–Schwinger residual at the same point, when computed.
    pub residual: Option<f64>,
}

impl Amplitude {
    pub fn new(name: impl Into<String>, z: Option<Complex64>, w: Option<Complex64>, value: Complex64) -> Self {
        Self {
            name: name.into(),
            z: z.map(pair),
            w: w.map(pair),
            value: pair(value),
            residual: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured deviation; absent when the computation itself failed.
    pub value: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// Passes iff `value <= tolerance`.
    pub fn bound(name: impl Into<String>, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value <= tolerance,
            value: value.is_finite().then_some(value),
            tolerance,
            detail: detail.into(),
        }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: false,
            value: None,
            tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ModelConfig,
    pub deformed: Option<DeformedSpectrum>,
    pub amplitudes: Vec<Amplitude>,
    pub matrices: BTreeMap<String, Vec<Vec<f64>>>,
    pub scalars: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// Wall-clock time; the only field that differs between identical runs.
    pub elapsed_seconds: f64,
}

/// One CSV line; unused columns stay empty.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    section: &'a str,
    name: &'a str,
    row: Option<usize>,
    col: Option<usize>,
    re: Option<f64>,
    im: Option<f64>,
    z_re: Option<f64>,
    z_im: Option<f64>,
    w_re: Option<f64>,
    w_im: Option<f64>,
    passed: Option<bool>,
}

impl<'a> CsvRow<'a> {
    fn new(section: &'a str, name: &'a str) -> Self {
        Self {
            section,
            name,
            row: None,
            col: None,
            re: None,
            im: None,
            z_re: None,
            z_im: None,
            w_re: None,
            w_im: None,
            passed: None,
        }
    }
}

impl ResultDocument {
    pub fn new(command: &str, config: &ModelConfig) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            config: config.clone(),
            deformed: None,
            amplitudes: Vec::new(),
            matrices: BTreeMap::new(),
            scalars: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            elapsed_seconds: 0.0,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: "<document>".into(),
            line: e.line(),
            column: e.column(),
            message: crate::config::strip_location(&e.to_string()),
        })
    }

    /// Flat table of amplitudes, matrix entries, scalars and checks.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let io = |e: csv::Error| CliError::Io(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(def) = &self.deformed {
            for (k, (&e, &r)) in def.epsilons.iter().zip(&def.rhos).enumerate() {
                for (name, v) in [("epsilon", e), ("rho", r)] {
                    w.serialize(CsvRow {
                        row: Some(k),
                        re: Some(v),
                        ..CsvRow::new("deformed", name)
                    })
                    .map_err(io)?;
                }
            }
        }
        for a in &self.amplitudes {
            w.serialize(CsvRow {
                re: Some(a.value[0]),
                im: Some(a.value[1]),
                z_re: a.z.map(|z| z[0]),
                z_im: a.z.map(|z| z[1]),
                w_re: a.w.map(|w| w[0]),
                w_im: a.w.map(|w| w[1]),
                ..CsvRow::new("amplitude", &a.name)
            })
            .map_err(io)?;
        }
        for (name, m) in &self.matrices {
            for (i, row) in m.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    w.serialize(CsvRow {
                        row: Some(i),
                        col: Some(j),
                        re: Some(v),
                        ..CsvRow::new("matrix", name)
                    })
                    .map_err(io)?;
                }
            }
        }
        for (name, &v) in &self.scalars {
            w.serialize(CsvRow {
                re: Some(v),
                ..CsvRow::new("scalar", name)
            })
            .map_err(io)?;
        }
        for c in &self.checks {
            w.serialize(CsvRow {
                re: c.value,
                passed: Some(c.passed),
                ..CsvRow::new("check", &c.name)
            })
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Printed instead of a document when a command fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl ErrorRecord {
    pub fn new(command: &str, err: &CliError) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            kind: err.kind().into(),
            message: err.to_string(),
            exit_code: err.exit_code(),
        }
    }
}
