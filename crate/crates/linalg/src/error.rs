use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ambient rank mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("lattices do not span the same rational subspace")]
    SpanMismatch,
    #[error("second lattice is not contained in the first")]
    NotASublattice,
    #[error("quotient is infinite (rank {big} vs {small})")]
    InfiniteQuotient { big: usize, small: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("multimodular reconstruction did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, LinalgError>;
