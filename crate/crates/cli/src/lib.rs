//! Command-line front end for `addlab`: set construction, one-off
//! computations, and the seeded verification suite.

use std::path::PathBuf;

use addlab::VerificationReport;

pub mod commands;
pub mod config;
pub mod emit;
pub mod suite;

pub use config::{Fault, SuiteConfig, SuiteName};
pub use suite::{run_suite, LedgerRow, SuiteRun};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] addlab::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 1 for a violated precondition (the input was read but is not
    /// admissible), 2 for everything that stops the run before any checking.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(addlab::Error::Precondition { .. }) => 1,
            _ => 2,
        }
    }
}

/// A failed report standing in for a verifier that refused its input,
/// carrying the witness when there is one.
pub fn error_report(lemma: &str, err: &addlab::Error) -> VerificationReport {
    let mut r = VerificationReport::new(lemma);
    if let Some(w) = err.witness() {
        r.input("witness", w);
    }
    r.note(err.to_string());
    r.assert_true("precondition holds", false);
    r
}

/// Turns a refused precondition into a failed report; other errors pass through.
pub fn or_failure(lemma: &str, res: addlab::Result<VerificationReport>) -> Result<VerificationReport, CliError> {
    match res {
        Ok(r) => Ok(r),
        Err(e @ addlab::Error::Precondition { .. }) => Ok(error_report(lemma, &e)),
        Err(e) => Err(e.into()),
    }
}
