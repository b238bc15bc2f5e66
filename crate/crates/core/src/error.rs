use thiserror::Error;

/// Error type shared by the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("axis index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid mass grid: {0}")]
    InvalidGrid(String),
    #[error("coordinate {0} is outside [0,1]")]
    CoordinateOutOfRange(String),
    #[error("box corners must satisfy lo <= hi componentwise")]
    BoxNotOrdered,
    #[error("mixture weights must be nonnegative and sum to 1")]
    BadMixtureWeights,
    #[error("tied sample values on axis {axis}")]
    TiedSample { axis: usize },
    #[error("sample must be nonempty and rectangular with finite values")]
    BadSample,
    #[error("dimension {n} exceeds reflection enumeration cap {cap}")]
    ReflectionCap { n: usize, cap: usize },
    #[error("not a valid permutation image list")]
    BadPermutation,
    #[error("{op} requires dimension >= {min}, got {got}")]
    DimensionTooSmall {
        op: &'static str,
        min: usize,
        got: usize,
    },
    #[error("{op} is not supported for this copula representation")]
    Unsupported { op: &'static str },
    #[error("index sets must be disjoint")]
    NotDisjoint,
    #[error("index sets must partition {{1,..,n}}")]
    NotAPartition,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
