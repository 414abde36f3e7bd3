use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("semiring mismatch: expected {expected}, got {got}")]
    TagMismatch { expected: String, got: String },

    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("unknown letter {0}")]
    UnknownLetter(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("value {value} is invalid for semiring {tag}")]
    InvalidValue { tag: String, value: String },

    #[error("operation not supported for semiring {tag}: {hint}")]
    UnsupportedSemiring { tag: String, hint: String },

    #[error("numeration language must be infinite")]
    FiniteLanguage,

    #[error("numeration language is not prefix-closed, but the operation requires it")]
    NotPrefixClosed,

    #[error("state budget of {budget} exceeded during {during}")]
    BudgetExceeded { budget: usize, during: String },

    #[error("tape index {index} out of range for arity {arity}")]
    TapeOutOfRange { index: usize, arity: usize },

    #[error("variable block mismatch: {0}")]
    BlockMismatch(String),

    #[error("infinite count detected: {0}")]
    InfiniteCount(String),

    #[error("image is not finite: {0}")]
    InfiniteImage(String),

    #[error("composition is not defined: {0}")]
    CompositionUndefined(String),

    #[error("invalid document: {0}")]
    InvalidDocument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
