use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code
/// class (validation, domain, numerical).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("basis dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("the Husimi distribution has no zeros in the normal phase (alpha_e = 0)")]
    NoZeros,

    #[error("singular input: {0}")]
    Singular(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    EigenNotConverged { iterations: usize, residual: f64 },

    #[error("cutoff ceiling {ceiling} reached (last |dE| = {delta_energy:.3e}, tail weight = {tail_weight:.3e})")]
    CutoffCeiling {
        ceiling: usize,
        delta_energy: f64,
        tail_weight: f64,
    },

    #[error("quadrature did not converge: last relative change {relative_change:.3e} (value {value})")]
    QuadratureNotConverged { value: f64, relative_change: f64 },

    #[error("local descent did not converge (best point alpha = {alpha}, z = {z}, |grad| = {gradient:.3e})")]
    MinimizerNotConverged { alpha: f64, z: f64, gradient: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::DimensionOverflow { .. } => 2,
            Error::NoZeros | Error::Singular(_) | Error::DegenerateState(_) => 3,
            Error::EigenNotConverged { .. }
            | Error::CutoffCeiling { .. }
            | Error::QuadratureNotConverged { .. }
            | Error::MinimizerNotConverged { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
