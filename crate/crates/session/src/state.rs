//! Session state as a fold over its event records. The live service and the
//! crash-recovery path both go through [`SessionState::apply`].

use std::collections::HashMap;
use std::sync::Arc;

use qcsample_core::plan::BoundaryPoint;
use qcsample_core::{DecisionTable, PlanDocument, Verdict};
use serde::Serialize;
use time::OffsetDateTime;
use uuid::Uuid;

use crate::error::{Result, ServiceError};
use crate::record::{Event, LogRecord, LOG_SCHEMA_VERSION};

/// One entry of a session's inspection history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutcomeEvent {
    pub sequence_number: u64,
    pub is_defect: bool,
    #[serde(with = "time::serde::rfc3339")]
    pub recorded_at: OffsetDateTime,
    /// Set on amendment entries.
    pub amended: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reopen: Option<bool>,
}

/// What applying one record did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Applied {
    /// A finished session's verdict or position was recomputed.
    pub reopened: bool,
    /// An amendment changed the replayed path of a finished session but was
    /// not allowed to reopen it.
    pub held: bool,
}

/// Earlier request answered again without appending anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Duplicate {
    pub sequence_number: u64,
}

#[derive(Debug, Clone)]
pub struct SessionState {
    pub id: Uuid,
    pub created_at: OffsetDateTime,
    pub plan: PlanDocument,
    table: Arc<DecisionTable>,
    /// Effective outcome of each sequence number, amendments applied.
    outcomes: Vec<bool>,
    history: Vec<OutcomeEvent>,
    inspected: u64,
    defects: u64,
    verdict: Verdict,
    outcome_keys: HashMap<String, (u64, bool)>,
    amendment_keys: HashMap<String, (u64, bool, bool)>,
}

impl SessionState {
    /// Starts a session from its `created` record.
    pub fn create(record: &LogRecord) -> Result<Self> {
        check_version(record)?;
        let Event::Created { session_id, plan } = &record.event else {
            return Err(ServiceError::invalid("record", "a session log must start with a created record"));
        };
        plan.validate()?;
        let table = plan.plan.decision_table()?;
        let verdict = table.decide(0, 0);
        Ok(SessionState {
            id: *session_id,
            created_at: record.recorded_at,
            plan: *plan,
            table: Arc::new(table),
            outcomes: Vec::new(),
            history: Vec::new(),
            inspected: 0,
            defects: 0,
            verdict,
            outcome_keys: HashMap::new(),
            amendment_keys: HashMap::new(),
        })
    }

    /// Folds a complete record list.
    pub fn replay<'a, I: IntoIterator<Item = &'a LogRecord>>(records: I) -> Result<Self> {
        let mut it = records.into_iter();
        let first = it
            .next()
            .ok_or_else(|| ServiceError::invalid("record", "empty session log"))?;
        let mut state = SessionState::create(first)?;
        for rec in it {
            state.apply(rec)?;
        }
        Ok(state)
    }

    pub fn table(&self) -> &Arc<DecisionTable> {
        &self.table
    }

    pub fn inspected(&self) -> u64 {
        self.inspected
    }

    pub fn defects(&self) -> u64 {
        self.defects
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    /// Number of outcome records, which is the last sequence number.
    pub fn recorded(&self) -> u64 {
        self.outcomes.len() as u64
    }

    pub fn history(&self) -> &[OutcomeEvent] {
        &self.history
    }

    /// Effective outcomes in sequence order.
    pub fn outcomes(&self) -> &[bool] {
        &self.outcomes
    }

    /// Boundary at the next inspection, while the session is open.
    pub fn next_boundary(&self) -> Option<BoundaryPoint> {
        if self.verdict.is_final() {
            return None;
        }
        let m = self.inspected + 1;
        let (a, r) = (self.table.accept_max(m), self.table.reject_min(m));
        Some(BoundaryPoint {
            m,
            accept_max_d: (a >= 0).then_some(a as u64),
            reject_min_d: (r <= m as i64).then_some(r as u64),
        })
    }

    /// Validates a new outcome. `Ok(Some(_))` marks a retried request.
    pub fn check_outcome(&self, is_defect: bool, key: Option<&str>, expected: Option<u64>) -> Result<Option<Duplicate>> {
        if let Some(k) = key {
            if let Some(&(seq, was)) = self.outcome_keys.get(k) {
                if was != is_defect {
                    return Err(ServiceError::IdempotencyConflict(k.to_string()));
                }
                return Ok(Some(Duplicate { sequence_number: seq }));
            }
        }
        if self.verdict.is_final() {
            return Err(ServiceError::Finished { verdict: self.verdict });
        }
        let next = self.recorded() + 1;
        if let Some(got) = expected {
            if got != next {
                return Err(ServiceError::SequenceConflict { expected: next, got });
            }
        }
        Ok(None)
    }

    /// Validates an amendment. `Ok(Some(_))` marks a retried request.
    pub fn check_amendment(
        &self,
        sequence_number: u64,
        is_defect: bool,
        reopen: bool,
        key: Option<&str>,
    ) -> Result<Option<Duplicate>> {
        if let Some(k) = key {
            if let Some(&prev) = self.amendment_keys.get(k) {
                if prev != (sequence_number, is_defect, reopen) {
                    return Err(ServiceError::IdempotencyConflict(k.to_string()));
                }
                return Ok(Some(Duplicate { sequence_number }));
            }
        }
        if sequence_number == 0 || sequence_number > self.recorded() {
            return Err(ServiceError::invalid(
                "sequence_number",
                format!("{sequence_number} is not in 1..={}", self.recorded()),
            ));
        }
        Ok(None)
    }

    /// Applies a record that follows the current state.
    pub fn apply(&mut self, record: &LogRecord) -> Result<Applied> {
        check_version(record)?;
        match &record.event {
            Event::Created { .. } => Err(ServiceError::invalid("record", "duplicate created record")),
            Event::Outcome { sequence_number, is_defect, idempotency_key } => {
                if self.check_outcome(*is_defect, idempotency_key.as_deref(), Some(*sequence_number))?.is_some() {
                    return Err(ServiceError::invalid("record", "outcome record repeats an idempotency key"));
                }
                self.outcomes.push(*is_defect);
                if let Some(k) = idempotency_key {
                    self.outcome_keys.insert(k.clone(), (*sequence_number, *is_defect));
                }
                self.history.push(OutcomeEvent {
                    sequence_number: *sequence_number,
                    is_defect: *is_defect,
                    recorded_at: record.recorded_at,
                    amended: false,
                    reopen: None,
                });
                self.inspected += 1;
                self.defects += u64::from(*is_defect);
                self.verdict = self.table.decide(self.inspected, self.defects);
                Ok(Applied::default())
            }
            Event::Amendment { sequence_number, is_defect, reopen, idempotency_key } => {
                let key = idempotency_key.as_deref();
                if self.check_amendment(*sequence_number, *is_defect, *reopen, key)?.is_some() {
                    return Err(ServiceError::invalid("record", "amendment record repeats an idempotency key"));
                }
                self.outcomes[*sequence_number as usize - 1] = *is_defect;
                if let Some(k) = idempotency_key {
                    self.amendment_keys.insert(k.clone(), (*sequence_number, *is_defect, *reopen));
                }
                self.history.push(OutcomeEvent {
                    sequence_number: *sequence_number,
                    is_defect: *is_defect,
                    recorded_at: record.recorded_at,
                    amended: true,
                    reopen: Some(*reopen),
                });
                Ok(self.recompute(*reopen))
            }
        }
    }

    fn recompute(&mut self, reopen: bool) -> Applied {
        let (verdict, m, d) = self.table.run(self.outcomes.iter().copied());
        let changed = (verdict, m, d) != (self.verdict, self.inspected, self.defects);
        let finished = self.verdict.is_final();
        if finished && changed && !reopen {
            return Applied { reopened: false, held: true };
        }
        self.verdict = verdict;
        self.inspected = m;
        self.defects = d;
        Applied { reopened: finished && changed, held: false }
    }
}

fn check_version(record: &LogRecord) -> Result<()> {
    if record.schema_version != LOG_SCHEMA_VERSION {
        return Err(ServiceError::invalid(
            "schema_version",
            format!("unsupported log schema version {}", record.schema_version),
        ));
    }
    Ok(())
}
