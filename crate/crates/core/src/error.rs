use thiserror::Error;

/// Errors raised by the matched-projection toolkit.
///
/// The variants fall in three families that the CLI maps onto distinct exit
/// codes: input/validation problems, numeric failures of the kernels, and
/// out-of-range requests.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {actual}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("matrix is not idempotent: ||Q^2 - Q||_F = {residual:e}")]
    NotIdempotent { residual: f64 },

    #[error("matrix is not a projection: {detail}")]
    NotProjection { detail: String },

    #[error("matrix is not Hermitian: ||H - H*||_F = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("matrix has a significantly negative eigenvalue {value:e}")]
    NegativeEigenvalue { value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition PQ = Q violated: ||PQ - Q||_F = {residual:e}")]
    CoveringViolated { residual: f64 },

    #[error("distance {alpha} outside the attainable range [{min}, {max}]")]
    OutOfRange { alpha: f64, min: f64, max: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for failures of the numerical kernels themselves, as opposed to
    /// bad input or an unattainable request.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
