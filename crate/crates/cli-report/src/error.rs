use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] numberfield::FieldError),
    #[error(transparent)]
    Iis(#[from] iis_core::IisError),
    #[error(transparent)]
    Rips(#[from] band_rips::RipsError),
    #[error(transparent)]
    Surface(#[from] surface_sections::SurfaceError),
    #[error("internal: {0}")]
    Internal(String),
}
