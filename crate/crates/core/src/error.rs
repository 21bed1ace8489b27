use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("rank must be at least 1")]
    ZeroRank,

    #[error("empty Wick product")]
    EmptyProduct,

    #[error("state has a monomial of degree {found} above the requested degree {degree}")]
    DegreeTooHigh { degree: usize, found: usize },

    #[error("state is not weight-homogeneous")]
    Inhomogeneous,

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("solution is not unique: {0}")]
    NotUnique(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("weight cutoff {cutoff} too small: need at least {needed}")]
    CutoffTooSmall { cutoff: usize, needed: usize },

    #[error("nonpositive matrix entry at ({row}, {col})")]
    NonPositiveEntry { row: usize, col: usize },

    #[error("scratch I/O failed: {0}")]
    Scratch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
