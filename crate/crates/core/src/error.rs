use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator dimension must be at least 1")]
    EmptyOperator,
    #[error("expected {expected} entries for dimension {dim}, got {actual}")]
    EntryCount {
        dim: usize,
        expected: usize,
        actual: usize,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operator is not Hermitian (relative asymmetry {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("beta is not an involution (|beta^2 - I| = {residual:e})")]
    NotInvolution { residual: f64 },
    #[error("spectral gap violated: smallest |eigenvalue| {smallest:e} <= gap tolerance {gap_tol:e}")]
    GapViolation { smallest: f64, gap_tol: f64 },
    #[error("operator is not positive definite: smallest eigenvalue {smallest:e} <= gap tolerance {gap_tol:e}")]
    NotPositiveDefinite { smallest: f64, gap_tol: f64 },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("potential evaluation failed: {0}")]
    Eval(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("axis {axis} out of range for a {dimension}D grid")]
    InvalidAxis { axis: usize, dimension: usize },
    #[error("model dimension {dim} exceeds the configured cap {cap}")]
    MemoryCap { dim: usize, cap: usize },
    #[error("operation requires a {expected}D model, got {actual}D")]
    WrongModelDimension { expected: usize, actual: usize },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid scan: {0}")]
    InvalidScan(String),
}

pub type Result<T> = std::result::Result<T, Error>;
