use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A concrete counterexample attached to a failed precondition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `B + C ⊆ A` with `|B| = s`, `|C| = t`; elements as group indices.
    Grid { b: Vec<usize>, c: Vec<usize> },
    /// A nontrivial solution `(x_1, …, x_k)` of a linear equation.
    Solution { xs: Vec<usize> },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("precondition violated: {msg}")]
    Precondition { msg: String, witness: Option<Witness> },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("overflow computing {0}")]
    Overflow(&'static str),

    #[error("consistency check failed: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Error::Precondition { witness, .. } => witness.as_ref(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
