//! Session registry: creation, outcome recording, amendments and recovery.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use qcsample_core::design::{design_double, design_sequential, design_single, DesignOptions};
use qcsample_core::plan::{BoundaryPoint, Curtailment, Plan};
use qcsample_core::{PlanDocument, PopulationModel, QualityConfig, Verdict};
use serde::{Deserialize, Serialize};
use time::OffsetDateTime;
use tokio::sync::Mutex;
use uuid::Uuid;

use crate::error::{Result, ServiceError};
use crate::record::{Event, LogRecord};
use crate::state::{OutcomeEvent, SessionState};
use crate::store::{self, LogWriter};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub storage_dir: PathBuf,
    /// Flush every record to the device before answering.
    pub fsync: bool,
}

impl ServiceConfig {
    pub fn new(storage_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig { storage_dir: storage_dir.into(), fsync: false }
    }
}

/// Plan family designed for a session created from a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    Single,
    Double,
    #[default]
    Sequential,
}

/// Quality parameters that override a preset field by field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFields {
    pub p_a: Option<f64>,
    pub p_r: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub ci_half_width: Option<f64>,
}

impl ConfigFields {
    fn resolve(&self, base: Option<QualityConfig>) -> Result<QualityConfig> {
        let pick = |v: Option<f64>, b: Option<f64>, name: &str| {
            v.or(b).ok_or_else(|| ServiceError::invalid(format!("config.{name}"), "missing and no preset given"))
        };
        Ok(QualityConfig {
            p_a: pick(self.p_a, base.map(|c| c.p_a), "p_a")?,
            p_r: pick(self.p_r, base.map(|c| c.p_r), "p_r")?,
            alpha: pick(self.alpha, base.map(|c| c.alpha), "alpha")?,
            beta: pick(self.beta, base.map(|c| c.beta), "beta")?,
            ci_half_width: pick(self.ci_half_width, base.map(|c| c.ci_half_width), "ci_half_width")?,
        })
    }
}

/// Body of `POST /sessions`: a ready plan document, or a configuration to
/// design one from.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    #[serde(default)]
    pub plan: Option<PlanDocument>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub config: Option<ConfigFields>,
    #[serde(default)]
    pub model: Option<PopulationModel>,
    /// Shorthand for a without-replacement model of this size.
    #[serde(default)]
    pub lot_size: Option<u64>,
    #[serde(default)]
    pub kind: Option<PlanKind>,
    #[serde(default)]
    pub curtailment: Option<Curtailment>,
}

impl CreateSession {
    /// Resolves the request to a validated plan document.
    pub fn into_plan(self) -> Result<PlanDocument> {
        if let Some(doc) = self.plan {
            let extra = self.preset.is_some()
                || self.config.is_some()
                || self.model.is_some()
                || self.lot_size.is_some()
                || self.kind.is_some()
                || self.curtailment.is_some();
            if extra {
                return Err(ServiceError::invalid("plan", "a plan document excludes the design fields"));
            }
            doc.validate()?;
            return Ok(doc);
        }
        let base = match self.preset.as_deref() {
            Some(name) => Some(
                QualityConfig::preset(name)
                    .ok_or_else(|| ServiceError::invalid("preset", format!("unknown preset {name:?}")))?,
            ),
            None => None,
        };
        let config = self.config.unwrap_or_default().resolve(base)?;
        let model = match (self.model, self.lot_size) {
            (Some(_), Some(_)) => return Err(ServiceError::invalid("lot_size", "give either model or lot_size")),
            (Some(m), None) => m,
            (None, Some(n)) => PopulationModel::without_replacement(n)?,
            (None, None) => return Err(ServiceError::invalid("model", "missing; give model or lot_size")),
        };
        config.validate()?;
        let kind = self.kind.unwrap_or_default();
        if kind != PlanKind::Sequential && self.curtailment.is_some() {
            return Err(ServiceError::invalid("curtailment", "only applies to sequential plans"));
        }
        let opts = DesignOptions::default();
        let plan = match kind {
            PlanKind::Single => Plan::Single(design_single(&config, &model, &opts)?),
            PlanKind::Double => Plan::Double(design_double(&config, &model, &opts)?),
            PlanKind::Sequential => {
                Plan::Sequential(design_sequential(&config, &model, self.curtailment.unwrap_or_default(), &opts)?)
            }
        };
        Ok(PlanDocument::new(config, model, plan))
    }
}

/// Position and verdict of a session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionSummary {
    pub id: Uuid,
    pub kind: &'static str,
    #[serde(with = "time::serde::rfc3339")]
    pub created_at: OffsetDateTime,
    pub inspected: u64,
    pub defects: u64,
    pub verdict: Verdict,
    /// Last inspection at which the plan can still be undecided.
    pub horizon: u64,
    /// Number of outcomes recorded, including any past the verdict.
    pub recorded: u64,
    pub next_boundary: Option<BoundaryPoint>,
}

/// Full session view with plan, boundary geometry and history.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionDetail {
    #[serde(flatten)]
    pub summary: SessionSummary,
    pub plan: PlanDocument,
    pub boundary_snapshot: Vec<BoundaryPoint>,
    pub events: Vec<OutcomeEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeReply {
    #[serde(flatten)]
    pub session: SessionSummary,
    pub sequence_number: u64,
    /// The idempotency key matched an earlier request; nothing was recorded.
    pub duplicate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmendmentReply {
    #[serde(flatten)]
    pub session: SessionSummary,
    pub sequence_number: u64,
    pub duplicate: bool,
    /// A finished session's state was recomputed.
    pub reopened: bool,
    /// The amendment would change a finished session, which was kept final.
    pub held: bool,
}

struct Session {
    boundaries: Arc<Vec<BoundaryPoint>>,
    /// Serializes mutations; held across the log write.
    writer: Mutex<LogWriter>,
    state: RwLock<SessionState>,
}

impl Session {
    fn summary(&self) -> SessionSummary {
        summarize(&self.state.read().expect("state lock"))
    }

    fn detail(&self) -> SessionDetail {
        let state = self.state.read().expect("state lock");
        SessionDetail {
            summary: summarize(&state),
            plan: state.plan,
            boundary_snapshot: self.boundaries.as_ref().clone(),
            events: state.history().to_vec(),
        }
    }
}

fn summarize(state: &SessionState) -> SessionSummary {
    SessionSummary {
        id: state.id,
        kind: state.plan.plan.kind(),
        created_at: state.created_at,
        inspected: state.inspected(),
        defects: state.defects(),
        verdict: state.verdict(),
        horizon: state.table().horizon(),
        recorded: state.recorded(),
        next_boundary: state.next_boundary(),
    }
}

/// All sessions, backed by their event logs.
pub struct SessionService {
    config: ServiceConfig,
    sessions: RwLock<HashMap<Uuid, Arc<Session>>>,
}

impl SessionService {
    /// Opens the storage directory and replays every session found there.
    pub async fn open(config: ServiceConfig) -> Result<Self> {
        std::fs::create_dir_all(&config.storage_dir)?;
        let mut sessions = HashMap::new();
        for path in store::list_logs(&config.storage_dir)? {
            let records = store::read_log(&path)?;
            let state = SessionState::replay(&records).map_err(|e| ServiceError::Corrupt {
                path: path.clone(),
                line: 0,
                reason: e.to_string(),
            })?;
            let writer = LogWriter::open(&path, config.fsync).await?;
            sessions.insert(state.id, Arc::new(Session::new(state, writer)));
        }
        tracing::info!(count = sessions.len(), dir = %config.storage_dir.display(), "sessions recovered");
        Ok(SessionService { config, sessions: RwLock::new(sessions) })
    }

    pub fn storage_dir(&self) -> &std::path::Path {
        &self.config.storage_dir
    }

    pub async fn create(&self, request: CreateSession) -> Result<SessionDetail> {
        let plan = request.into_plan()?;
        self.create_from_plan(plan).await
    }

    pub async fn create_from_plan(&self, plan: PlanDocument) -> Result<SessionDetail> {
        let id = Uuid::new_v4();
        let record = LogRecord::new(Event::Created { session_id: id, plan });
        let state = SessionState::create(&record)?;
        let path = store::log_path(&self.config.storage_dir, id);
        let writer = LogWriter::create(&path, &record, self.config.fsync).await?;
        let session = Arc::new(Session::new(state, writer));
        let detail = session.detail();
        self.sessions.write().expect("registry lock").insert(id, session);
        tracing::debug!(%id, kind = detail.summary.kind, "session created");
        Ok(detail)
    }

    fn session(&self, id: Uuid) -> Result<Arc<Session>> {
        self.sessions
            .read()
            .expect("registry lock")
            .get(&id)
            .cloned()
            .ok_or(ServiceError::NotFound(id))
    }

    pub fn get(&self, id: Uuid) -> Result<SessionDetail> {
        Ok(self.session(id)?.detail())
    }

    pub fn summary(&self, id: Uuid) -> Result<SessionSummary> {
        Ok(self.session(id)?.summary())
    }

    /// Summaries ordered by creation time, then id.
    pub fn list(&self) -> Vec<SessionSummary> {
        let sessions: Vec<Arc<Session>> = self.sessions.read().expect("registry lock").values().cloned().collect();
        let mut out: Vec<SessionSummary> = sessions.iter().map(|s| s.summary()).collect();
        out.sort_by(|a, b| (a.created_at, a.id).cmp(&(b.created_at, b.id)));
        out
    }

    /// Records the next inspected item. With `expected_sequence` set, the
    /// request only succeeds if it would become that sequence number.
    pub async fn record_outcome(
        &self,
        id: Uuid,
        is_defect: bool,
        idempotency_key: Option<String>,
        expected_sequence: Option<u64>,
    ) -> Result<OutcomeReply> {
        let session = self.session(id)?;
        let mut writer = session.writer.lock().await;
        let (dup, next) = {
            let state = session.state.read().expect("state lock");
            (
                state.check_outcome(is_defect, idempotency_key.as_deref(), expected_sequence)?,
                state.recorded() + 1,
            )
        };
        if let Some(dup) = dup {
            return Ok(OutcomeReply { session: session.summary(), sequence_number: dup.sequence_number, duplicate: true });
        }
        let record = LogRecord::new(Event::Outcome { sequence_number: next, is_defect, idempotency_key });
        writer.append(&record).await?;
        session.state.write().expect("state lock").apply(&record)?;
        Ok(OutcomeReply { session: session.summary(), sequence_number: next, duplicate: false })
    }

    pub async fn amend(
        &self,
        id: Uuid,
        sequence_number: u64,
        is_defect: bool,
        reopen: bool,
        idempotency_key: Option<String>,
    ) -> Result<AmendmentReply> {
        let session = self.session(id)?;
        let mut writer = session.writer.lock().await;
        let dup = session.state.read().expect("state lock").check_amendment(
            sequence_number,
            is_defect,
            reopen,
            idempotency_key.as_deref(),
        )?;
        if dup.is_some() {
            return Ok(AmendmentReply {
                session: session.summary(),
                sequence_number,
                duplicate: true,
                reopened: false,
                held: false,
            });
        }
        let record = LogRecord::new(Event::Amendment { sequence_number, is_defect, reopen, idempotency_key });
        writer.append(&record).await?;
        let applied = session.state.write().expect("state lock").apply(&record)?;
        Ok(AmendmentReply {
            session: session.summary(),
            sequence_number,
            duplicate: false,
            reopened: applied.reopened,
            held: applied.held,
        })
    }
}

impl Session {
    fn new(state: SessionState, writer: LogWriter) -> Self {
        Session {
            boundaries: Arc::new(state.table().boundaries()),
            writer: Mutex::new(writer),
            state: RwLock::new(state),
        }
    }
}
