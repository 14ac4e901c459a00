//! Error type shared across the toolkit.
//!
//! Every variant carries a stable machine-readable category string
//! (see [`Error::category`]) so batch tooling can match on failures
//! without parsing display text.

use thiserror::Error;

/// Toolkit-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A cell could not be parsed; names the file, row and column.
    #[error("parse error in {path} at row {row}, column {column}: {detail}")]
    Parse {
        path: String,
        row: usize,
        column: usize,
        detail: String,
    },

    /// Series ids present in a data file but missing from the info file.
    #[error("orphan series missing from info file: {}", ids.join(", "))]
    OrphanSeries { ids: Vec<String> },

    /// A vector or matrix has the wrong dimensions.
    #[error("shape error: {0}")]
    Shape(String),

    /// A duplicate key (series id, learner name) was inserted.
    #[error("conflict: {0}")]
    Conflict(String),

    /// Invalid run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Too few observations for the requested operation.
    #[error("insufficient history: {0}")]
    InsufficientHistory(String),

    /// A scale denominator is zero (constant or seasonally constant series).
    #[error("degenerate scale: {0}")]
    DegenerateScale(String),

    /// A reference (Naive2) aggregate is zero, so relative metrics are undefined.
    #[error("degenerate reference: {0}")]
    DegenerateReference(String),

    /// A learner does not cover every series of the corpus.
    #[error("coverage error for learner {learner}: missing series {}", ids.join(", "))]
    Coverage { learner: String, ids: Vec<String> },

    /// An input violates a model's domain (e.g. non-positive value in a
    /// multiplicative decomposition).
    #[error("domain error: {0}")]
    Domain(String),

    /// Training produced a non-finite loss.
    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable category string for machine consumption.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse-error",
            Error::OrphanSeries { .. } => "orphan-series",
            Error::Shape(_) => "shape-error",
            Error::Conflict(_) => "conflict-error",
            Error::Config(_) => "config-error",
            Error::InsufficientHistory(_) => "insufficient-history",
            Error::DegenerateScale(_) => "degenerate-scale",
            Error::DegenerateReference(_) => "degenerate-reference",
            Error::Coverage { .. } => "coverage-error",
            Error::Domain(_) => "domain-error",
            Error::Divergence(_) => "divergence",
            Error::Io { .. } => "io-error",
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
