use thiserror::Error;

/// Error type shared by the whole crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("not computable: {0}")]
    NotComputable(String),
    #[error("unsupported ring: {0}")]
    UnsupportedRing(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("rank {0} exceeds the supported maximum of {max}", max = crate::clifford::MAX_RANK)]
    RankTooLarge(usize),
    #[error("quadratic kernel splitting unavailable: {0}")]
    SplitUnavailable(String),
    #[error("unknown check id: {0}")]
    UnknownCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
