use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("set V is not real, selfadjoint formula does not apply")]
    NotSelfadjoint,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("field generator is explicit and cannot be extended")]
    CannotExtend,
    #[error("no qualifying window within the search horizon of {horizon} indices ({side} side, n = {n})")]
    HorizonExceeded { side: &'static str, n: usize, horizon: i64 },
    #[error("index window [{lo}, {hi}] outside the materialized field [{field_lo}, {field_hi}]")]
    OutOfRange { lo: i64, hi: i64, field_lo: i64, field_hi: i64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },
    #[error("operation requires an unshifted system (shift_k = {0})")]
    UnsupportedShift(i32),
    #[error("symbol vanishes on the unit circle (min |a(t)| = {0:e})")]
    SymbolVanishes(f64),
    #[error("shifted Toeplitz operator is not invertible (winding number {0})")]
    NotInvertible(i32),
    #[error("matrix is exactly singular (zero pivot at row {0})")]
    ExactlySingular(usize),
    #[error("operator is not Fredholm: {0}")]
    NotFredholm(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotFredholm(_) => 4,
            Error::ExactlySingular(_)
            | Error::HorizonExceeded { .. }
            | Error::BudgetExceeded(_)
            | Error::SymbolVanishes(_)
            | Error::NotInvertible(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
