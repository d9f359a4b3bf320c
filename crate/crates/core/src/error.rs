use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI exit codes and the C ABI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    NonConvergence,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("velocity grid inadequate: {0}")]
    GridInadequacy(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("refinement exceeded {max_level} levels in cell centered at {center:?}")]
    RefinementOverflow { max_level: u32, center: Vec<f64> },

    #[error("linear solver failure: {0}")]
    LinearSolver(String),

    #[error("solution diverged at iteration {iteration}: {msg}")]
    Divergence { iteration: usize, msg: String },

    #[error("in space cell ({i}, {j}): {source}")]
    InCell {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Structural(_)
            | Error::Validation(_)
            | Error::Parse { .. }
            | Error::Io { .. }
            | Error::Json { .. } => ErrorKind::Input,
            Error::NonConvergence { .. } => ErrorKind::NonConvergence,
            Error::InCell { source, .. } => source.kind(),
            Error::Domain(_)
            | Error::GridInadequacy(_)
            | Error::RefinementOverflow { .. }
            | Error::LinearSolver(_)
            | Error::Divergence { .. } => ErrorKind::Numerical,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_cell(self, i: usize, j: usize) -> Self {
        Error::InCell {
            i,
            j,
            source: Box::new(self),
        }
    }
}
