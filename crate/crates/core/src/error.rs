use std::path::PathBuf;

/// Errors raised by the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected N = {expected}, got N = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expectation value has imaginary part {imag:e}; operator is not Hermitian")]
    NonHermitian { imag: f64 },

    #[error("integration failed: norm drifted by {drift:e} between samples (limit {limit:e})")]
    Integration { drift: f64, limit: f64 },

    #[error("every sample of the trajectory has a vanishing mean spin (over-squeezed trajectory)")]
    OverSqueezed,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for file-system failures, false for physics or validation errors.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Format { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
