use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Shape of a matrix as `(rows, cols)`.
pub type Shape = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: dimension mismatch between {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: Shape,
        right: Shape,
    },

    #[error("matrix data has length {len}, expected {rows}x{cols}")]
    BadLength { rows: usize, cols: usize, len: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// `column` is 1-based.
    #[error("not positive definite at column {column}")]
    NotPositiveDefinite { column: usize },

    #[error("zero diagonal entry at index {index} of triangular factor")]
    ZeroDiagonal { index: usize },

    #[error("eigenvalue iteration did not converge; stuck at index {index}")]
    NoConvergence { index: usize },

    #[error("matrix is numerically rank deficient ({context})")]
    RankDeficient { context: String },

    #[error("block {block} numerically dependent")]
    DependentBlock { block: usize },

    #[error(
        "inter-block factorization failed at block {block}: {reason}; \
         consider a larger sketch dimension k or a different inter-block method"
    )]
    InterblockFailure { block: usize, reason: String },

    #[error("Krylov breakdown at order {order}: {source}")]
    Breakdown {
        order: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("s-step basis breakdown at power index {power}: {source}")]
    PowerBreakdown {
        power: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
