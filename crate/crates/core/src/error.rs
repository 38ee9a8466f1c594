use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero-length observation at row {0}")]
    ZeroRow(usize),

    #[error("geodesic endpoints are identical or antipodal")]
    DegenerateGeodesic,

    #[error("set is empty; distance undefined")]
    EmptySet,

    #[error("set operation cannot be represented as a union of caps minus a union of caps")]
    Unrepresentable,

    #[error("no observation exceeds the threshold {0}")]
    NoExceedances(f64),

    #[error("every observation exceeds the threshold {0}; the statistic is undefined")]
    AllExceed(f64),

    #[error("only {found} exceedances above the threshold, at least {required} required")]
    InsufficientExceedances { found: usize, required: usize },

    #[error("insufficient tail data: {0}")]
    InsufficientTail(String),

    #[error("oracle responses are not monotone in the ball radius (r={lo:.6}: {g_lo}, r={hi:.6}: {g_hi})")]
    NonMonotoneOracle { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("tail limit between {0} and {1} is not supported")]
    UnsupportedCombination(String, String),

    #[error("hazard of {0} has no closed-form inverse")]
    NonInvertibleHazard(String),

    #[error("malformed input at line {line}: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
