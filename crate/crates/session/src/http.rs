//! HTTP+JSON routes.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/sessions` | [`CreateSession`] |
//! | GET | `/sessions` | |
//! | GET | `/sessions/{id}` | |
//! | POST | `/sessions/{id}/outcomes` | [`OutcomeRequest`] |
//! | POST | `/sessions/{id}/amendments?reopen=true` | [`AmendmentRequest`] |

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use qcsample_core::QcError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::error::ServiceError;
use crate::service::{CreateSession, SessionService};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeRequest {
    pub is_defect: bool,
    #[serde(default)]
    pub idempotency_key: Option<String>,
    /// Sequence number the client expects this outcome to receive.
    #[serde(default)]
    pub expected_sequence: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmendmentRequest {
    pub sequence_number: u64,
    pub is_defect: bool,
    #[serde(default)]
    pub idempotency_key: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
pub struct AmendmentQuery {
    #[serde(default)]
    pub reopen: bool,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
}

/// Error as sent to clients.
#[derive(Debug)]
pub struct ApiError(ServiceError);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let message = self.0.to_string();
        let (status, error, field) = match self.0 {
            ServiceError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found", None),
            ServiceError::Finished { .. } => (StatusCode::CONFLICT, "finished", None),
            ServiceError::SequenceConflict { .. } => (StatusCode::CONFLICT, "sequence_conflict", None),
            ServiceError::IdempotencyConflict(_) => (StatusCode::CONFLICT, "idempotency_conflict", None),
            ServiceError::Invalid { field, .. } => (StatusCode::UNPROCESSABLE_ENTITY, "invalid", Some(field)),
            ServiceError::Plan(QcError::InvalidConfig { field, .. }) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "invalid_config", Some(field.to_string()))
            }
            ServiceError::Plan(QcError::Infeasible { .. } | QcError::InfeasibleWidth { .. }) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "infeasible", None)
            }
            ServiceError::Plan(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_plan", None),
            ServiceError::Storage(_) | ServiceError::Corrupt { .. } => {
                tracing::error!(%message, "storage failure");
                (StatusCode::INTERNAL_SERVER_ERROR, "storage", None)
            }
        };
        (status, Json(ErrorBody { error, message, field })).into_response()
    }
}

struct Malformed(StatusCode, String);

impl IntoResponse for Malformed {
    fn into_response(self) -> Response {
        let error = if self.0 == StatusCode::BAD_REQUEST { "malformed" } else { "invalid" };
        (self.0, Json(ErrorBody { error, message: self.1, field: Some("body".into()) })).into_response()
    }
}

/// Parses a JSON body: syntax errors are 400, shape errors 422.
fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, Malformed> {
    serde_json::from_slice(body).map_err(|e| {
        let status = match e.classify() {
            serde_json::error::Category::Data => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        Malformed(status, e.to_string())
    })
}

fn session_id(raw: &str) -> Result<Uuid, ApiError> {
    Uuid::parse_str(raw).map_err(|_| ApiError(ServiceError::NotFound(Uuid::nil())))
}

pub fn router(service: Arc<SessionService>) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/:id", get(fetch))
        .route("/sessions/:id/outcomes", post(outcome))
        .route("/sessions/:id/amendments", post(amend))
        .with_state(service)
}

async fn create(State(svc): State<Arc<SessionService>>, body: Bytes) -> Response {
    let request: CreateSession = match parse(&body) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    match svc.create(request).await {
        Ok(detail) => (StatusCode::CREATED, Json(detail)).into_response(),
        Err(e) => ApiError(e).into_response(),
    }
}

async fn list(State(svc): State<Arc<SessionService>>) -> Response {
    Json(svc.list()).into_response()
}

async fn fetch(State(svc): State<Arc<SessionService>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(svc.get(session_id(&id)?)?).into_response())
}

async fn outcome(State(svc): State<Arc<SessionService>>, Path(id): Path<String>, body: Bytes) -> Response {
    let request: OutcomeRequest = match parse(&body) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    let result = async {
        let id = session_id(&id)?;
        Ok::<_, ApiError>(
            svc.record_outcome(id, request.is_defect, request.idempotency_key, request.expected_sequence)
                .await?,
        )
    }
    .await;
    match result {
        Ok(reply) => Json(reply).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn amend(
    State(svc): State<Arc<SessionService>>,
    Path(id): Path<String>,
    Query(query): Query<AmendmentQuery>,
    body: Bytes,
) -> Response {
    let request: AmendmentRequest = match parse(&body) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    let result = async {
        let id = session_id(&id)?;
        Ok::<_, ApiError>(
            svc.amend(id, request.sequence_number, request.is_defect, query.reopen, request.idempotency_key)
                .await?,
        )
    }
    .await;
    match result {
        Ok(reply) => Json(reply).into_response(),
        Err(e) => e.into_response(),
    }
}

/// Serves the routes on `listener` until the process stops.
pub async fn serve(listener: tokio::net::TcpListener, service: Arc<SessionService>) -> std::io::Result<()> {
    tracing::info!(addr = ?listener.local_addr().ok(), "session service listening");
    axum::serve(listener, router(service)).await
}
