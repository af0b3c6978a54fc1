use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid precision: {0}")]
    Precision(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Iteration budget exhausted (Jacobi sweeps, series terms, Newton steps).
    #[error("no convergence after {sweeps} iterations (residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    /// A certificate could not be issued at the requested tolerance.
    #[error("certificate failure: {0}")]
    Certificate(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
