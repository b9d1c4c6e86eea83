use thiserror::Error;

/// Errors raised by the numerical layers (operators, models, engines).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("singular matrix in linear solve (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("integrator step size underflow at t = {t} us (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("steady state is not unique: two smallest singular values {smallest:.3e}, {second:.3e}")]
    DegenerateKernel { smallest: f64, second: f64 },

    #[error("population {0} exceeds 1/2, outside the positive-temperature domain")]
    NegativeTemperature(f64),

    #[error("trajectory never settles within the stage threshold (final residual {0:.3e})")]
    NoConvergence(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
