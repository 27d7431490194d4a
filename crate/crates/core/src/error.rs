use thiserror::Error;

/// Errors raised by the spectral layer, the data layer and the charge evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid shape mismatch: expected {expected} samples, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("band limit {requested} exceeds the resolved limit {resolved} of the grid")]
    BandLimitExceeded { requested: usize, resolved: usize },

    #[error("grid resolution too low for band limit {band_limit}: {reason}")]
    GridTooCoarse { band_limit: usize, reason: String },

    #[error("kernel obstruction: l=1 content {content:.3e} exceeds tolerance {tolerance:.3e}")]
    KernelObstruction { content: f64, tolerance: f64 },

    #[error("field has nonzero mean {mean:.3e} (tolerance {tolerance:.3e})")]
    NonzeroMean { mean: f64, tolerance: f64 },

    #[error("data is not in the center-of-mass frame: {0}")]
    Frame(String),

    #[error("band limits disagree: {0}")]
    BandLimitMismatch(String),

    #[error("shear potential {field} has l<=1 content at (l={l}, mu={mu}) in strict mode")]
    LowDegreeShear { field: &'static str, l: usize, mu: i64 },

    #[error("tensor is not symmetric traceless: defect {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    NotSymmetricTraceless { defect: f64, tolerance: f64 },

    #[error("non-finite parameter: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed data document: {0}")]
    Parse(String),

    #[error("unsupported data document version {0}")]
    UnknownVersion(u64),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
