use thiserror::Error;

/// Errors raised by the numerical layers and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("point outside grid: {0}")]
    OutOfGrid(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("no convergence after {iterations} iterations (last delta {last_delta:e})")]
    NonConvergence { iterations: usize, last_delta: f64, history: Vec<f64> },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("mode {mode}: {source}")]
    Mode {
        mode: String,
        #[source]
        source: Box<Error>,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Domain(_) | Error::OutOfGrid(_) | Error::GridMismatch(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::Mode { source, .. } => source.exit_code(),
            Error::Divergent(_) | Error::Numerical(_) | Error::Io(_) => 4,
        }
    }
}
