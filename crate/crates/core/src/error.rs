use thiserror::Error;

/// Errors raised by the planar solver and its oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Newton continuation stalled; `reached` is the last coupling that was solved.
    #[error("deformation solver did not converge at lambda = {lambda} (last solved lambda = {reached})")]
    NonConvergence { lambda: f64, reached: f64 },

    #[error("evaluation point {re}{im:+}i lies on a pole of J")]
    PoleHit { re: f64, im: f64 },

    #[error("evaluation too close to the pole set: {0}")]
    PoleProximity(String),

    #[error("root defect {defect:e} exceeds {limit:e}")]
    RootDefect { defect: f64, limit: f64 },

    #[error("linear system is singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("resultant vanishes identically (coincident deformed eigenvalues?)")]
    DegenerateResultant,

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("contour crosses the branch cut of the logarithm near {re}{im:+}i")]
    BranchCrossing { re: f64, im: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("Pade approximant is degenerate: {0}")]
    PadeDegenerate(String),

    #[error("Lambert W iteration did not converge for argument {0}")]
    WNonConvergence(f64),
}

impl Error {
    /// Variant name, for structured error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpectrum(_) => "InvalidSpectrum",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::PoleHit { .. } => "PoleHit",
            Error::PoleProximity(_) => "PoleProximity",
            Error::RootDefect { .. } => "RootDefect",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::DegenerateResultant => "DegenerateResultant",
            Error::QuadratureNonConvergence(_) => "QuadratureNonConvergence",
            Error::BranchCrossing { .. } => "BranchCrossing",
            Error::DomainError(_) => "DomainError",
            Error::PadeDegenerate(_) => "PadeDegenerate",
            Error::WNonConvergence(_) => "WNonConvergence",
        }
    }

    /// Whether the error reflects bad input rather than a failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpectrum(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
