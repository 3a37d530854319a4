use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Rows that should lie on the unit sphere but do not.
    #[error("{} row(s) are not unit norm (first offending rows: {:?})", .rows.len(), &.rows[..rows.len().min(10)])]
    NotUnitNorm { rows: Vec<usize> },

    /// Cluster centre generation could not satisfy the separation constraint.
    #[error("generation error: {0}")]
    Generation(String),

    #[error("cluster {0} has no points")]
    EmptyCluster(usize),

    /// A spherical mean collapsed to the zero vector.
    #[error("cluster {0} has a degenerate (zero) mean direction")]
    DegenerateCenter(usize),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
