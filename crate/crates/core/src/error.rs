use thiserror::Error;

/// Errors raised by the approximation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("binomial coefficient C({n}, {k}) overflows")]
    Overflow { n: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is indefinite: eigenvalue {eigenvalue:e} below clip tolerance {tolerance:e}")]
    Indefinite { eigenvalue: f64, tolerance: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is not symmetric: relative skew {0:e}")]
    Asymmetric(f64),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("sample list is empty")]
    EmptySamples,

    #[error("non-finite value {value} at {location:?}")]
    NonFinite { value: f64, location: Vec<f64> },

    #[error("point {index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}
