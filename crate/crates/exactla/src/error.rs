use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not contained in the larger space (first offending basis vector {0})")]
    NotContained(usize),
    #[error("matrix entry at ({row}, {col}) is not an integer")]
    NonIntegral { row: usize, col: usize },
    #[error("linear system has no solution")]
    NoSolution,
}
