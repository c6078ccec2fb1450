use std::path::PathBuf;

use qcsample_core::{QcError, Verdict};
use thiserror::Error;
use uuid::Uuid;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("session {0} not found")]
    NotFound(Uuid),

    #[error("session already finished with verdict {verdict:?}")]
    Finished { verdict: Verdict },

    #[error("expected sequence number {expected}, got {got}")]
    SequenceConflict { expected: u64, got: u64 },

    #[error("idempotency key {0:?} was already used for a different request")]
    IdempotencyConflict(String),

    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error(transparent)]
    Plan(#[from] QcError),

    #[error("storage error: {0}")]
    Storage(#[from] std::io::Error),

    #[error("corrupt session log {path}:{line}: {reason}")]
    Corrupt { path: PathBuf, line: usize, reason: String },
}

impl ServiceError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ServiceError::Invalid { field: field.into(), reason: reason.into() }
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
