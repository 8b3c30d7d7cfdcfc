use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Too few distinct locations, or spacings too small to invert.
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter lies outside its mathematical domain (e.g. λ ≤ 0, κ < 0).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("mode search failed: {0}")]
    ModeSearch(String),

    #[error("chain failed at sweep {sweep}: {source}")]
    Chain {
        sweep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("too few retained samples: need {needed}, have {have}")]
    TooFewSamples { needed: usize, have: usize },
}
