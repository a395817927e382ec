use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid feature space: {0}")]
    InvalidFeatureSpace(String),

    #[error("feature index {index} out of range for {n} features")]
    InvalidFeatureSet { index: usize, n: usize },

    #[error("conditioning event has zero probability")]
    ConditioningOnNull,

    #[error("conditional family has no entry for marginal atom {0}")]
    IncompleteFamily(String),

    #[error("point {0} is outside the hypothesis domain")]
    DomainMismatch(String),

    #[error("arity error: {0}")]
    Arity(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("{what} of size {size} exceeds the cap of {cap}{hint}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("precondition rejected: {0}")]
    Precondition(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
