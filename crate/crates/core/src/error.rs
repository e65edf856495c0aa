//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Code construction aborted (forbidden-substring acceptance rate too low,
    /// or the requested geometry is impossible).
    #[error("code construction failed: {0}")]
    Construction(String),

    /// A pilot sample of at least the pilot order matched at two positions.
    /// De Bruijn uniqueness makes this impossible for an intact pilot.
    #[error("pilot integrity violated: ambiguous match for a sample of at least the pilot order")]
    PilotCorrupted,

    /// Malformed input text (fragment dump, code file, bit string, grid spec).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
