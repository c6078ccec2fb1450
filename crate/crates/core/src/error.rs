use thiserror::Error;

/// Errors produced by the distribution kernels, interval estimators and plan
/// search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid quality configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("no feasible {kind} plan: {reason}")]
    Infeasible { kind: &'static str, reason: String },

    #[error("interval half-width {half_width} is not attainable (searched up to n = {searched_up_to})")]
    InfeasibleWidth { half_width: f64, searched_up_to: u64 },

    #[error("model mismatch: {0}")]
    ModelMismatch(String),
}

impl QcError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        QcError::Domain(msg.into())
    }

    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        QcError::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = QcError> = std::result::Result<T, E>;
