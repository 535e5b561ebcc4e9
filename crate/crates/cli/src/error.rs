use thiserror::Error;

/// Failures surfaced by the command-line layer.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Compute(#[from] quartic_core::Error),
}

impl CliError {
    /// 1 for a failed computation, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(e) if !e.is_input_error() => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Validation { .. } => "ValidationError",
            CliError::Io(_) => "IoError",
            CliError::Usage(_) => "UsageError",
            CliError::Compute(e) => e.kind(),
        }
    }
}
