use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix or element is not hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("bad system shape: {0}")]
    BadShape(String),

    #[error("unknown index `{0}`")]
    UnknownIndex(String),

    #[error("operands belong to different directed systems")]
    SystemMismatch,

    #[error("sequence is not Cauchy: tail oscillation {oscillation:e} exceeds {tolerance:e}")]
    NotCauchy { oscillation: f64, tolerance: f64 },

    #[error("element is not order bounded with respect to the pre-unit")]
    NotOrderBounded,

    #[error("element is not bounded")]
    NotBounded,

    #[error("preconditions unmet: {0}")]
    PreconditionsUnmet(String),

    #[error("unknown weight {0}")]
    UnknownWeight(usize),

    #[error("weights {0} and {1} are not comparable")]
    NotComparable(usize, usize),

    #[error("edge {src} -> {dst} carries no compression witness")]
    NoCompressionWitness { src: String, dst: String },

    #[error("partial product is undefined: {0}")]
    UndefinedProduct(String),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
