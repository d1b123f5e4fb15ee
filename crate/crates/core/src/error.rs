use thiserror::Error;

/// Errors raised by the computational core.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("block index {index} out of range for a partition with {weight} blocks")]
    BlockIndexOutOfRange { index: usize, weight: usize },

    #[error("{what} = {value} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("interval endpoint {0} meets the support of the configuration")]
    BoundaryCollision(String),

    #[error("label size k = {0} is missing from the label system")]
    MissingLabel(usize),

    #[error("invalid label system: {0}")]
    InvalidLabels(String),

    #[error("cannot certify the truncation: {0}")]
    NonCertifiable(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("boundary of boundary is nonzero in degree {degree}")]
    BoundarySquareNonzero { degree: usize },

    #[error("invalid colour data: {0}")]
    InvalidColours(String),

    #[error("stability violated for {context} in degree {degree} at n = {n}")]
    StabilityViolation {
        context: String,
        degree: usize,
        n: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
