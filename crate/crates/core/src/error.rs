use thiserror::Error;

/// Errors raised by the exact and numeric layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degree overflow: iterate degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: u128, cap: usize },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("not representable over Q(i): {0}")]
    NotRepresentable(String),

    #[error("search failure: {0}")]
    SearchFailure(String),

    #[error("numeric false positive: {0}")]
    NumericFalsePositive(String),

    #[error("group closure exceeded cap {cap} (infinite group or misconfigured cap)")]
    ClosureExceedsCap { cap: usize },

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable tag, used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DegreeOverflow { .. } => "degree-overflow",
            Error::NumericFailure(_) => "numeric-failure",
            Error::NotRepresentable(_) => "not-representable",
            Error::SearchFailure(_) => "search-failure",
            Error::NumericFalsePositive(_) => "numeric-false-positive",
            Error::ClosureExceedsCap { .. } => "closure-exceeds-cap",
            Error::HypothesisViolation(_) => "hypothesis-violation",
            Error::Internal(_) => "internal-error",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
