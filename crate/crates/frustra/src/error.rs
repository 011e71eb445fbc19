use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("instability: {0}")]
    Instability(String),

    #[error("no seed converged (best gradient residual {residual:e})")]
    Convergence { residual: f64 },

    #[error("wrong phase: {0}")]
    Phase(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("power-law fit rejected: r^2 = {r_squared} below threshold")]
    FitQuality { r_squared: f64 },

    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
