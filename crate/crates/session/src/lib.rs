//! Live inspection sessions over HTTP.
//!
//! A session wraps one plan. Inspectors post one outcome per item and get
//! back the running verdict, decided by the plan's decision table. Every
//! change is an appended JSON line in the session's log file, and the
//! in-memory state is a replay of that log, so a restarted service resumes
//! exactly where it stopped.

pub mod error;
pub mod http;
pub mod record;
pub mod service;
pub mod state;
pub mod store;

pub use error::{Result, ServiceError};
pub use http::{router, serve, AmendmentRequest, OutcomeRequest};
pub use service::{
    AmendmentReply, ConfigFields, CreateSession, OutcomeReply, PlanKind, ServiceConfig, SessionDetail,
    SessionService, SessionSummary,
};
pub use state::{OutcomeEvent, SessionState};
