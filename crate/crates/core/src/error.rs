use thiserror::Error;

use crate::classes::SimilarityClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("ambiguous eigenvalue clustering: {0}")]
    JordanAmbiguity(String),

    #[error("matrix is not {class}: {reason}")]
    ClassMismatch { class: SimilarityClass, reason: String },

    #[error("family is not {class}: {label} = {value:e} at {point:?}")]
    FamilyNotInClass {
        class: SimilarityClass,
        label: String,
        value: f64,
        point: Vec<f64>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("resampling exhausted after {attempts} attempts: {reason}")]
    ResamplingExhausted { attempts: usize, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn mismatch(class: SimilarityClass, reason: impl Into<String>) -> Self {
        Error::ClassMismatch {
            class,
            reason: reason.into(),
        }
    }
}
