use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("Ky-Fan index k={k} is out of range for n={n}")]
    BadIndex { k: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("field mismatch: {0}")]
    FieldError(String),

    #[error("shape error: {0}")]
    ShapeError(String),

    #[error("structural and circle-search parallelism decisions disagree: {0}")]
    MethodDisagreement(String),

    #[error("s_k = s_(k+1) for k={k}: the operation needs a spectral gap at k")]
    DegenerateGap { k: usize },

    #[error("matrix is not on the relative boundary of the cone")]
    NotBoundary,

    #[error("linear map is singular")]
    SingularMap,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
