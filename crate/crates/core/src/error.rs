use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, MhdError>;

#[derive(Debug, Error)]
pub enum MhdError {
    /// An argument outside the supported range (degree, quadrature size, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A state with non-positive density or pressure reached a routine that
    /// needs physical states.
    #[error("inadmissible state: {0}")]
    Admissibility(String),

    /// Bad run specification or config file contents.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("configuration error at line {line}: {message}")]
    ConfigLine { line: usize, message: String },

    /// Inconsistent input data, e.g. a potential that does not agree on a
    /// shared cell edge.
    #[error("data error: {0}")]
    Data(String),

    #[error("problem `{0}` has no exact solution")]
    NoExactSolution(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl MhdError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MhdError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            MhdError::Config(_) | MhdError::ConfigLine { .. } => 2,
            MhdError::Domain(_) | MhdError::NoExactSolution(_) => 2,
            MhdError::Admissibility(_) => 3,
            MhdError::Io { .. } => 4,
            MhdError::Data(_) => 1,
        }
    }

    /// Prefix an admissibility error with where it happened.
    pub fn at(self, context: impl std::fmt::Display) -> Self {
        match self {
            MhdError::Admissibility(m) => MhdError::Admissibility(format!("{context}: {m}")),
            other => other,
        }
    }
}
