use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("square root of a negative value {0}")]
    NegativeRadicand(String),
    #[error("terminating series hits a zero denominator at term {term}")]
    ZeroDenominator { term: usize },
    #[error("point has degree {got}, expected {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("lattice functions live on different lattices")]
    LatticeMismatch,
    #[error("degree {degree} exceeds the lattice size {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("degrees must satisfy n <= m <= N, got n={n}, m={m}, N={big_n}")]
    DegreeOrderViolation { n: usize, m: usize, big_n: usize },
    #[error("Gram matrix is singular at degree {degree}")]
    SingularGram { degree: usize },
    #[error("product formula is singular at chain position {position}")]
    ChainSingularity { position: usize },
    #[error("homogeneous coordinate sum is zero")]
    ZeroNorm,
    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported frame family for this check: {0}")]
    UnsupportedFamily(String),
    #[error("frame mixes exact and floating entries")]
    MixedExactness,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
