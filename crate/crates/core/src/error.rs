use thiserror::Error;

pub type Result<T, E = EmbedError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("every point pair is degenerate ({skipped} pairs below the minimum norm)")]
    EmptySecantSet { skipped: usize },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("{solver} diverged at iteration {iteration} ({params})")]
    Diverged {
        solver: &'static str,
        iteration: usize,
        params: String,
    },

    #[error("empty embedding: the solution has numerical rank 0")]
    EmptyEmbedding,

    #[error("R0 too small or parameters bad: the first solve at rank {rank} did not converge")]
    InitialRankTooSmall { rank: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl EmbedError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        EmbedError::InvalidInput(msg.into())
    }
}
