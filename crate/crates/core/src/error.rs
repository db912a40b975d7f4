use thiserror::Error;

/// Errors raised by the discrimination library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("chain length {size} outside supported range {min}..={max}")]
    SizeOutOfRange { size: usize, min: usize, max: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("eigensolver did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("ground state is degenerate (gap {gap:e})")]
    DegenerateGroundState { gap: f64 },

    #[error("vanishing single-particle energy at k = {momentum}")]
    GaplessMode { momentum: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("non-finite objective value at x = {0}")]
    NonFiniteObjective(f64),

    #[error("degenerate least-squares fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
