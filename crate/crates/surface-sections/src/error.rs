use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("unknown example {0} (expected 1 or 2)")]
    UnknownExample(u8),
    #[error("level {level} is within {eps} of the saddle level {saddle} (mod the x2 period)")]
    NearSaddle { level: f64, saddle: f64, eps: f64 },
    #[error("window radius must be positive and finite, got {0}")]
    EmptyWindow(f64),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
}
