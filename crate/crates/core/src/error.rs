use thiserror::Error;

use modvis_linalg::LinalgError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid level {0}")]
    InvalidLevel(u64),
    #[error("level {level} needs {symbols} Manin symbols, over the budget of {budget}")]
    LevelTooLarge { level: u64, symbols: u64, budget: u64 },
    #[error("lattice is not stable under the star involution")]
    NotStarStable,
    #[error("X0({0}) has genus zero")]
    GenusZero(u64),
    #[error("eigenvalue index {index} exceeds the budget {budget}")]
    BoundExceeded { index: u64, budget: u64 },
    #[error("no congruence: all compared eigenvalue differences vanish")]
    NoCongruence,
    #[error("the pair consists of a single newform")]
    PairDegenerate,
    #[error("{0} has positive analytic rank")]
    RankNotZero(String),
    #[error("hypothesis could not be verified: {0}")]
    HypothesisUnverifiable(String),
    #[error("invalid prime {0}")]
    InvalidPrime(u64),
    #[error("bad reduction at {0}")]
    BadReduction(u64),
    #[error("singular Weierstrass model")]
    SingularCurve,
    #[error("curve {label}: conductor {computed} does not match the recorded {recorded}")]
    ConductorMismatch { label: String, computed: u64, recorded: u64 },
    #[error("curve {label}: declared {field} {declared} differs from the computed {computed}")]
    DeclaredMismatch { label: String, field: &'static str, declared: u64, computed: u64 },
    #[error("curve {label} has conductor {conductor} but the forms have level {level}")]
    LevelMismatch { label: String, conductor: u64, level: u64 },
    #[error("curve {0} matches no rational newform")]
    NoMatchingNewform(String),
    #[error("curve {0} matches more than one rational newform")]
    AmbiguousMatch(String),
    #[error("schema error on line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("cache file {path} is corrupt: {message}")]
    CacheCorrupt { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
