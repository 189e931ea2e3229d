use thiserror::Error;

/// Errors produced by the Steiner engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("type is not realizable for this configuration: {0}")]
    NotRealizable(String),

    #[error("n = {n} exceeds the enumeration cap {cap}")]
    LimitExceeded { n: usize, cap: usize },

    #[error("relaxation did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("path leaves the configuration space at t = {t}")]
    DegeneratePath { t: f64 },

    #[error("no wall: both endpoints are won by the same type")]
    NoWall,

    #[error("bracket lost: neither type realizes inside [{lo}, {hi}]")]
    BracketLost { lo: f64, hi: f64 },

    #[error("invalid combinatorial type: {0}")]
    InvalidType(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
