use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix not invertible")]
    SingularMatrix,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("too many IN values: {given} > t = {max}")]
    TooManyInValues { given: usize, max: usize },

    #[error("empty IN clause")]
    EmptyInClause,

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("token/table key mismatch")]
    KeyMismatch,

    #[error("group suite mismatch: file uses suite {found:#06x}, expected {expected:#06x}")]
    SuiteMismatch { expected: u16, found: u16 },

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("selectivity fractions sum to {0}, which exceeds 1")]
    SelectivityOverflow(f64),

    #[error("unknown leakage model `{0}`")]
    UnknownModel(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("refusing to overwrite {0} (pass --force)")]
    WouldOverwrite(PathBuf),

    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 2 usage, 3 format or fingerprint, 4 crypto parameter, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_)
            | Error::WouldOverwrite(_)
            | Error::UnknownModel(_)
            | Error::SelectivityOverflow(_) => 2,
            Error::Format { .. }
            | Error::Parse { .. }
            | Error::KeyMismatch
            | Error::SuiteMismatch { .. }
            | Error::SchemaMismatch(_) => 3,
            Error::SingularMatrix
            | Error::DimensionMismatch { .. }
            | Error::InvalidParams(_)
            | Error::TooManyInValues { .. }
            | Error::EmptyInClause => 4,
            Error::Io { .. } => 1,
        }
    }
}
