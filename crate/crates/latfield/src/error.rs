use exactla::LinAlgError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("bad factor: {0}")]
    BadFactor(String),
    #[error("no coboundary out of the top degree {0}")]
    TopDegree(usize),
    #[error("degree 0 has no codifferential or boundary")]
    DegreeZero,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("out of bounds: {0}")]
    OutOfBounds(String),
    #[error("embedding is not causally compatible: {0}")]
    NotCausallyCompatible(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cochain is not closed")]
    NotClosed,
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("linear system has no solution: {0}")]
    NoSolution(String),
    #[error("source touches the margin: {0}")]
    MarginViolation(String),
    #[error("regions are not causally disjoint: {0}")]
    NotDisjoint(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}
