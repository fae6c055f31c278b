use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("operator is zero")]
    ZeroOperator,
    #[error("numerical radius is only a norm over the complex field")]
    RealFieldUnsupported,
    #[error("matrix is singular or not bounded below (sigma_min/sigma_max = {ratio:e})")]
    SingularA { ratio: f64 },
    #[error("state is degenerate: g(A*A) = 0")]
    StateDegenerate,
    #[error("column {0} of A is zero")]
    ZeroColumn(usize),
    #[error("vector is not unit (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("Dykstra projections stalled after {iterations} iterations (residual {residual:e})")]
    DykstraStalled { iterations: usize, residual: f64 },
    #[error("no step along the separating direction decreased the norm")]
    WitnessValidationFailed,
    #[error("invalid instance specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
