use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}: missing column `{column}`")]
    MissingColumn { file: String, column: String },

    #[error("{file} row {row}: unknown port `{port}`")]
    UnknownPort {
        file: String,
        row: u64,
        port: String,
    },

    #[error("{file} row {row}: {reason}")]
    InvariantViolation {
        file: String,
        row: u64,
        reason: String,
    },

    #[error("{0}: no usable rows")]
    EmptyDataset(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no daily shipping cost configured for vessel type `{0}`")]
    UnknownVesselType(String),

    #[error("treatment count must be at least 1")]
    ZeroTreatments,

    #[error("risk reduction is undefined when the no-policy risk is zero")]
    UndefinedReduction,

    #[error("rule context {context} has no incoming representation in the network")]
    DanglingRule { context: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("scenario results come from different datasets ({left} vs {right})")]
    DatasetMismatch { left: String, right: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },

    #[error("{file}: {source}")]
    Json {
        file: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// True for errors caused by user input (files, flags, configuration)
    /// rather than by the tool itself.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::DanglingRule { .. })
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invariant(file: &str, row: u64, reason: impl Into<String>) -> Self {
        Error::InvariantViolation {
            file: file.to_string(),
            row,
            reason: reason.into(),
        }
    }
}
