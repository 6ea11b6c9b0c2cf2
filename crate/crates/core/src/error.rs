use thiserror::Error;

/// Errors shared across the crate. Witness searches that merely run out of
/// budget do not use this type; they return a [`crate::specification::SearchResult`]
/// so that "no witness found" stays an ordinary, reportable outcome.
#[derive(Debug, Error)]
pub enum Error {
    #[error("space mismatch: expected {expected}, got {found}")]
    SpaceMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("point outside space: {0}")]
    InvalidPoint(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid segment specification: {0}")]
    InvalidSpec(String),

    #[error("conjugacy commutation failed: max error {max_error} exceeds tolerance {tol}")]
    InvalidConjugacy { max_error: f64, tol: f64 },

    #[error("continuity modulus missing or unusable for eps={eps}")]
    InvalidModulus { eps: f64 },

    #[error("segment structures do not match: {0}")]
    MismatchedSegments(String),

    #[error("base certificate missing or invalid for element {index}: {reason}")]
    BadBaseCertificate { index: usize, reason: String },

    #[error("atom count mismatch: {0}")]
    AtomCountMismatch(String),

    #[error("hyperspace certificate does not trace the singleton targets (best achieved {best})")]
    InvalidHypercert { best: f64 },

    #[error("unknown catalog system: {0}")]
    UnknownSystem(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
