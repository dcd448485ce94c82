//! Configuration-driven runs of the ground-state solver, the radial
//! evolution, the classifier and the verification suites.

pub mod commands;
pub mod config;
pub mod output;
pub mod suites;

use hardy_choquard::Error;

pub use config::{ConfigError, RunConfig};

/// Exit code for a failed run: 2 for configuration and input errors, 1 for
/// numerical failures.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::NonConvergence(_)
                | Error::StepFailure { .. }
                | Error::Cache(_)
                | Error::Io(_) => 1,
                _ => 2,
            };
        }
    }
    1
}
