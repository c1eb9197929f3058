use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus is not squarefree")]
    NotSquarefree,
    #[error("interval holds {0} real roots of the modulus, expected exactly one")]
    NotIsolating(usize),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix has a negative entry")]
    NegativeEntries,
    #[error("value is not an eigenvalue of the matrix")]
    NotAnEigenvalue,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("sign refinement exhausted its iteration budget")]
    RefinementExhausted,
}
