use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is not monic: leading coefficient is {0}")]
    NotMonic(String),
    #[error("non-integer coefficient at byte {offset}")]
    NonIntegerCoefficient { offset: usize },
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("constant polynomial has no root to approximate")]
    ZeroDegree,
    #[error("empty coefficient list")]
    EmptyInput,
    #[error("letter index {index} out of range for alphabet of size {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("coefficient {0} is too large to expand into a run of letters")]
    CoefficientTooLarge(String),
    #[error("word length would exceed the cap of {cap} letters at step {step}")]
    EngineOverflow { step: usize, cap: u64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ratio estimates need degree at least 2")]
    DegreeTooSmall,
    #[error("invalid option: {0}")]
    InvalidOption(String),
}
