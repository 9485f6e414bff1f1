use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid bimodule: {0}")]
    InvalidBimodule(String),

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("functional is not positive: smallest eigenvalue {0:e}")]
    NotPositive(f64),

    /// An algebra element extracted from a one-sided endomorphism of the
    /// standard form did not reproduce that endomorphism.
    #[error("extraction failed: {context} (defect {defect:e})")]
    Extraction { context: String, defect: f64 },

    /// A map defined on a spanning family did not vanish on the null space
    /// of the source Gram matrix.
    #[error("not well defined: {context} (defect {defect:e})")]
    NotWellDefined { context: String, defect: f64 },

    #[error("singular frame operator in projective realization")]
    SingularFrame,

    #[error("instance: {0}")]
    Instance(String),

    #[error("schema: {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
