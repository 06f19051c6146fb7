use thiserror::Error;

/// Errors raised by the spinor engine and its diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("field map does not preserve reality (imaginary residual {residual:e})")]
    NonReal { residual: f64 },

    #[error("state is massless (mass {mass:e}); tetrad and rest frame are undefined")]
    MasslessState { mass: f64 },

    #[error("state is not at rest (|p| / m = {residual:e})")]
    NotAtRest { residual: f64 },

    #[error("four-momentum is not timelike and future-pointing")]
    NotTimelike,

    #[error("no transverse component to fit (amplitude {amplitude:e})")]
    DegenerateFit { amplitude: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
