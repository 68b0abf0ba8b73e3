//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grand coalition value {0} is not positive; cannot normalize")]
    NonPositiveGrandValue(f64),

    #[error("coalition is empty")]
    EmptyCoalition,

    #[error("coalition sample is empty")]
    EmptySample,

    #[error("coalition batch is empty")]
    EmptyBatch,

    #[error("{n} players exceeds the supported maximum of {max}")]
    TooManyPlayers { n: usize, max: usize },

    #[error("invalid distribution parameters: {0}")]
    InvalidDistributionParams(String),

    #[error("invalid graph parameters: {0}")]
    InvalidGraphParams(String),

    #[error("rule resampling exceeded {0} consecutive discards")]
    ResampleLimitExceeded(u64),

    #[error("input contains a non-finite value")]
    NonFiniteInput,

    #[error("payoff vector is off the simplex: {0}")]
    OffSimplex(String),

    #[error("numerical breakdown in simplex pivoting: {0}")]
    NumericalBreakdown(String),

    #[error("simplex pivot limit exceeded ({0} pivots)")]
    CycleLimitExceeded(u64),

    #[error("oracle call budget exhausted: spent {spent}, budget {budget}")]
    BudgetExhausted { spent: u64, budget: u64 },

    #[error("budget {budget} is too small; need at least {needed} calls")]
    BudgetTooSmall { budget: u64, needed: u64 },

    #[error("sequence is not a permutation of 0..{0}")]
    InvalidPermutation(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("target column {0:?} not found in header")]
    MissingTargetColumn(String),

    #[error("non-numeric cell at line {line}, column {column}")]
    NonNumericCell { line: usize, column: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
