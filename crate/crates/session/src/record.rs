//! On-disk event records. Each session is one JSON-lines file; every line is
//! a [`LogRecord`].

use qcsample_core::PlanDocument;
use serde::{Deserialize, Serialize};
use time::OffsetDateTime;
use uuid::Uuid;

/// Version of the event record layout. Written on every line.
pub const LOG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub schema_version: u32,
    #[serde(with = "time::serde::rfc3339")]
    pub recorded_at: OffsetDateTime,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    /// Always the first record of a session file.
    Created { session_id: Uuid, plan: PlanDocument },
    /// The next inspected item. `sequence_number` is one more than the
    /// number of earlier outcome records.
    Outcome {
        sequence_number: u64,
        is_defect: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        idempotency_key: Option<String>,
    },
    /// Correction of an earlier outcome.
    Amendment {
        sequence_number: u64,
        is_defect: bool,
        reopen: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        idempotency_key: Option<String>,
    },
}

impl LogRecord {
    pub fn new(event: Event) -> Self {
        LogRecord {
            schema_version: LOG_SCHEMA_VERSION,
            recorded_at: now(),
            event,
        }
    }
}

/// Current time truncated to whole microseconds, so that a timestamp
/// survives an RFC 3339 round trip unchanged.
pub fn now() -> OffsetDateTime {
    let t = OffsetDateTime::now_utc();
    t.replace_nanosecond(t.nanosecond() / 1000 * 1000).unwrap_or(t)
}
