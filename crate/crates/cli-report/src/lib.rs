//! Front end for the `thinsections` binary: the verification table, the
//! induction and machine runners, and section tracing.

mod error;
pub mod run;
pub mod section;
pub mod verify;

pub use error::CliError;
pub use run::{load_system, run, RunKind, RunOptions, RunOutcome};
pub use section::{cmd_section, Levels, SectionSummary, DEFAULT_SEED};
pub use verify::{exit_code, render_table, verify_rows, Inputs, Scope, Status, VerificationRow};

/// Joining tolerance for section tracing, from `THINSECTIONS_PRECISION` if set.
pub fn precision() -> Result<f64, CliError> {
    match std::env::var("THINSECTIONS_PRECISION") {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
            _ => Err(CliError::Usage(format!("THINSECTIONS_PRECISION must be a positive number, got {v:?}"))),
        },
        Err(_) => Ok(surface_sections::DEFAULT_EPS),
    }
}
