use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IisError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("interval is not contained in the transmitting interval")]
    NotContained,
    #[error("a pair cannot be transmitted along itself")]
    SelfTransmission,
    #[error("reduction precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no admissible move on the {0} side")]
    NoAdmissibleMove(&'static str),
    #[error("the two intervals at the {0} end have equal widths")]
    AmbiguousMove(&'static str),
    #[error("point lies outside the support")]
    OutOfSupport,
    #[error("json: {0}")]
    Json(String),
}
