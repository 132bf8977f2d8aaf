use thiserror::Error;

/// Errors produced by the numerical kernels and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("kernel singularity: evaluation at coincident points")]
    Singularity,

    #[error("sampling cadence too coarse: {0}")]
    Cadence(String),

    #[error("iteration failed: residual {residual:.3e} after {iterations} iterations")]
    IterationFailure { residual: f64, iterations: usize },

    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("CFL violation: dt {dt:.3e}, suggested dt {suggested:.3e}")]
    Cfl { dt: f64, suggested: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
