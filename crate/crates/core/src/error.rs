use thiserror::Error;

/// Errors produced by the library.
///
/// Variants map onto the two failure classes the CLI distinguishes: invalid
/// input (a violated precondition) and numerical failure (a computation that
/// could not reach its requested accuracy).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("component {component} carries no spectral mass")]
    DegenerateComponent { component: usize },

    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(&'static str),

    #[error("covariation requires alpha > 1 (got {alpha})")]
    UnsupportedOrder { alpha: f64 },

    #[error("alpha-summability certificate failed: {0}")]
    Certificate(String),

    #[error("tolerance {tol:e} unreachable: {reason}")]
    ToleranceUnreachable { tol: f64, reason: String },

    #[error("quadrature did not converge: estimated error {error:e} exceeds {tol:e}")]
    NoConvergence { error: f64, tol: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("empirical characteristic function is {value} at ({t}, {s}); log is unstable")]
    UnstableLog { t: f64, s: f64, value: f64 },

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::ToleranceUnreachable { .. }
                | Error::NoConvergence { .. }
                | Error::UnstableLog { .. }
                | Error::DegenerateDenominator(_)
        )
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
