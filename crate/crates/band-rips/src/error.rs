use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RipsError {
    #[error("subarc is not free")]
    NotFree,
    #[error("free subarc is not maximal")]
    NotMaximal,
    #[error("no free subarc: the machine halts")]
    Halted,
    #[error("chart: {0}")]
    Chart(String),
    #[error("json: {0}")]
    Json(String),
}
