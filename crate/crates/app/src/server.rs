//! HTTP session service.
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | POST | `/sessions` | `{n, threshold?}` | `{id, n, threshold}` |
//! | POST | `/sessions/restore` | session log text | `{id, n, threshold}` |
//! | GET | `/sessions/{id}` | | matrix snapshot and full history |
//! | POST | `/sessions/{id}/entries` | `{i, j, value}` | step record |
//! | DELETE | `/sessions/{id}/entries/{i}/{j}` | | step record |
//! | POST | `/sessions/{id}/undo` | | step record |
//! | GET | `/sessions/{id}/completion` | | completed matrix and CM* |
//! | GET | `/sessions/{id}/log` | | session log text |
//! | POST | `/evaluate` | `{matrix, threshold?, completion?}` | evaluation report |
//!
//! Errors are `{code, message}` with 404 for unknown sessions, 422 for
//! rejected entries or matrices and 400 for malformed requests.

use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use pcm_core::io::{emit_session_log, parse_matrix, parse_value, replay_session_log};
use pcm_core::{MonitorSession, StepRecord, Verdict, DEFAULT_THRESHOLD};

use crate::report::{complete, completion_report, evaluate, CompletionReport, EvalReport};
use crate::store::SessionStore;

pub const DEFAULT_IDLE_EXPIRY: Duration = Duration::from_secs(24 * 60 * 60);

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn unknown_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session {id}"))
    }

    fn invalid_entry(e: impl ToString) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_entry", e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Clone)]
pub struct AppState {
    store: Arc<SessionStore>,
}

impl AppState {
    pub fn new(idle_expiry: Duration) -> Self {
        Self {
            store: Arc::new(SessionStore::new(idle_expiry)),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/restore", post(restore_session))
        .route("/sessions/{id}", get(session_status))
        .route("/sessions/{id}/entries", post(add_entry))
        .route("/sessions/{id}/entries/{i}/{j}", delete(retract_entry))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/completion", get(session_completion))
        .route("/sessions/{id}/log", get(session_log))
        .route("/evaluate", post(evaluate_once))
        .with_state(state)
}

#[derive(Debug, Deserialize)]
struct CreateRequest {
    n: usize,
    threshold: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Created {
    id: String,
    n: usize,
    threshold: f64,
}

async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<CreateRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let Json(req) = body?;
    let threshold = req.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let session = MonitorSession::new(req.n, threshold).map_err(ApiError::invalid_entry)?;
    let id = state.store.insert(session);
    Ok((StatusCode::CREATED, Json(Created { id, n: req.n, threshold })))
}

async fn restore_session(State(state): State<AppState>, body: String) -> ApiResult<(StatusCode, Json<Created>)> {
    let session = replay_session_log(&body)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_log", e.to_string()))?;
    let (n, threshold) = (session.matrix().order(), session.threshold());
    let id = state.store.insert(session);
    Ok((StatusCode::CREATED, Json(Created { id, n, threshold })))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Value {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
struct EntryRequest {
    i: usize,
    j: usize,
    value: Value,
}

fn apply<F>(state: &AppState, id: &str, f: F) -> ApiResult<Json<StepRecord>>
where
    F: FnOnce(&mut MonitorSession) -> pcm_core::Result<StepRecord>,
{
    state
        .store
        .with(id, |slot| f(&mut slot.session))
        .ok_or_else(|| ApiError::unknown_session(id))?
        .map(Json)
        .map_err(ApiError::invalid_entry)
}

async fn add_entry(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<EntryRequest>, JsonRejection>,
) -> ApiResult<Json<StepRecord>> {
    let Json(req) = body?;
    let value = match req.value {
        Value::Number(v) => v,
        Value::Text(t) => parse_value(t.trim()).map_err(ApiError::invalid_entry)?,
    };
    apply(&state, &id, |s| s.add_entry(req.i, req.j, value).cloned())
}

async fn retract_entry(
    State(state): State<AppState>,
    Path((id, i, j)): Path<(String, usize, usize)>,
) -> ApiResult<Json<StepRecord>> {
    apply(&state, &id, |s| s.retract_entry(i, j).cloned())
}

async fn undo(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<StepRecord>> {
    apply(&state, &id, |s| s.undo().cloned())
}

#[derive(Debug, Serialize)]
struct Status {
    id: String,
    n: usize,
    threshold: f64,
    created_unix_ms: u128,
    cm_star: f64,
    alarm: bool,
    verdict: Verdict,
    /// Row-major grid, `null` where missing.
    matrix: Vec<Vec<Option<f64>>>,
    history: Vec<StepRecord>,
}

async fn session_status(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Status>> {
    state
        .store
        .with(&id, |slot| {
            let s = &slot.session;
            let n = s.matrix().order();
            Status {
                id: id.clone(),
                n,
                threshold: s.threshold(),
                created_unix_ms: slot
                    .created
                    .duration_since(std::time::UNIX_EPOCH)
                    .map_or(0, |d| d.as_millis()),
                cm_star: s.cm_star(),
                alarm: s.alarm(),
                verdict: s.feasibility_verdict(),
                matrix: (1..=n).map(|i| (1..=n).map(|j| s.matrix().get(i, j)).collect()).collect(),
                history: s.history().to_vec(),
            }
        })
        .map(Json)
        .ok_or_else(|| ApiError::unknown_session(&id))
}

async fn session_completion(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<CompletionReport>> {
    let m = state
        .store
        .with(&id, |slot| slot.session.matrix().clone())
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    let (cm_star, completed, _) = complete(&m).map_err(|e| {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "solver_failure", e.to_string())
    })?;
    Ok(Json(completion_report(&m, cm_star, &completed)))
}

async fn session_log(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let text = state
        .store
        .with(&id, |slot| emit_session_log(&slot.session))
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], text).into_response())
}

#[derive(Debug, Deserialize)]
struct EvaluateRequest {
    matrix: String,
    threshold: Option<f64>,
    #[serde(default)]
    completion: bool,
}

async fn evaluate_once(body: Result<Json<EvaluateRequest>, JsonRejection>) -> ApiResult<Json<EvalReport>> {
    let Json(req) = body?;
    let threshold = req.threshold.unwrap_or(DEFAULT_THRESHOLD);
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid_threshold",
            format!("threshold {threshold} must lie strictly between 0 and 1"),
        ));
    }
    let m = parse_matrix(&req.matrix)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_matrix", e.to_string()))?;
    evaluate(&m, threshold, req.completion)
        .map(Json)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "solver_failure", e.to_string()))
}
