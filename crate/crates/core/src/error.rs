use thiserror::Error;

/// Errors produced by the estimation and detection pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient samples for differencing order {order} (have {len})")]
    InsufficientForDifferencing { len: usize, order: usize },

    #[error("too few samples: need at least {needed}, have {len}")]
    TooFewSamples { len: usize, needed: usize },

    #[error("max lag {max_lag} must be smaller than the signal length {len}")]
    LagTooLarge { max_lag: usize, len: usize },

    #[error("degenerate autocovariance: r(0) = {0}")]
    DegenerateAutocovariance(f64),

    #[error("non-positive-definite autocovariance: |k({order})| = {magnitude} >= 1")]
    NonPositiveDefinite { order: usize, magnitude: f64 },

    #[error("zero-variance signal")]
    ZeroVariance,

    #[error("degenerate signal: Burg denominator vanished at order {0}")]
    DegenerateSignal(usize),

    #[error("grid too coarse for order: grid {grid_size} < 2 * {order}")]
    GridTooCoarse { grid_size: usize, order: usize },

    #[error("unstable AR polynomial")]
    UnstableModel,

    #[error("AICc undefined for this n,p (n = {n}, p = {p})")]
    AiccUndefined { n: usize, p: usize },

    #[error("non-positive innovation variance {0}")]
    NonPositiveVariance(f64),

    #[error("overlapping bands {0} and {1}")]
    OverlappingBands(String, String),

    #[error("unknown channel {0}")]
    UnknownChannel(String),

    #[error("annotation mismatch: missing [{missing}], extra [{extra}]")]
    AnnotationMismatch { missing: String, extra: String },

    #[error("channel {derivation} has no decision: {reason}")]
    FailedChannel { derivation: String, reason: String },

    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: u64, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
