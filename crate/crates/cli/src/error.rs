use std::io;
use std::path::PathBuf;

use qcsample_core::QcError;
use qcsample_session::ServiceError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Qc(#[from] QcError),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Service(#[from] ServiceError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 for bad input or an infeasible request, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Qc(_) => 2,
            CliError::Service(ServiceError::Plan(_) | ServiceError::Invalid { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_and_runtime_codes() {
        assert_eq!(CliError::usage("x").exit_code(), 2);
        let infeasible = QcError::Infeasible { kind: "single", reason: "cap".into() };
        assert_eq!(CliError::from(infeasible).exit_code(), 2);
        let io = io::Error::new(io::ErrorKind::BrokenPipe, "gone");
        assert_eq!(CliError::from(io).exit_code(), 1);
    }
}
