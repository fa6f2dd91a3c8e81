use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("data contains a non-finite value at row {row}, column {col}")]
    NonFiniteData { row: usize, col: usize },

    #[error("data matrix must have at least one row and one column (got {n}x{p})")]
    EmptyData { n: usize, p: usize },

    #[error("data buffer has {len} values, expected {n}x{p}")]
    ShapeMismatch { len: usize, n: usize, p: usize },

    #[error("requested {k} clusters but only {available} observations are available")]
    KTooLarge { k: usize, available: usize },

    #[error("number of groups K={big_k} exceeds the number of components k={k}")]
    KGreaterThank { big_k: usize, k: usize },

    #[error("K={k} is out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("trimming level {0} is outside [0, 0.5]")]
    AlphaOutOfRange(f64),

    #[error("restriction factor {0} must be >= 1")]
    RestrictionOutOfRange(f64),

    #[error("cluster {0} is empty and could not be re-seeded")]
    DegenerateCluster(usize),

    #[error("covariance of component {0} is singular and could not be repaired")]
    SingularCovariance(usize),

    #[error("covariance of component {0} is not positive semi-definite")]
    NonPsdCovariance(usize),

    #[error("all eigenvalues are zero; the restriction has no scale to work with")]
    AllZeroEigenvalues,

    #[error("partitions have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("at least {needed} values are required, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("empty input vector")]
    EmptyVector,

    #[error("monitoring grid needs at least two levels, got {0}")]
    GridTooShort(usize),

    #[error("monitoring grid must be strictly descending within [0, 0.5]")]
    InvalidGrid,

    #[error("every monitoring level failed to fit")]
    AllLevelsFailed,

    #[error("cluster means could not be placed at separation {0} after {1} attempts")]
    SeparationInfeasible(f64, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
