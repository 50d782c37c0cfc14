//! HTTP routes over [`Engine`].

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::engine::{ActionRequest, Engine, NavigateRequest, ServiceError, SurveyRequest};
use crate::labels::Lang;

/// Error body of every failed request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<String>,
}

impl ServiceError {
    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::Validation { .. } | ServiceError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Forbidden(_) => StatusCode::FORBIDDEN,
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let (message, fields) = match &self {
            ServiceError::Validation { fields, message } => (message.clone(), fields.clone()),
            other => (other.to_string(), Vec::new()),
        };
        let body = ErrorBody { error: self.code().to_string(), message, fields };
        (self.status(), Json(body)).into_response()
    }
}

type Shared = State<Arc<Engine>>;
type ApiResult<T> = Result<T, ServiceError>;

fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ServiceError::Invalid(format!("malformed request body: {e}")))
}

#[derive(Debug, Default, Deserialize)]
struct LangQuery {
    lang: Option<String>,
}

impl LangQuery {
    fn lang(&self) -> ApiResult<Lang> {
        match &self.lang {
            None => Ok(Lang::default()),
            Some(code) => code
                .parse()
                .map_err(|message| ServiceError::Validation { fields: vec!["lang".into()], message }),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
struct ExportQuery {
    pseudo: Option<String>,
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/students", post(register_student))
        .route("/sessions/{id}/close", post(close_session))
        .route("/sessions/{id}/export", get(export))
        .route("/students/{id}/actions", post(submit_action))
        .route("/students/{id}/navigate", post(navigate))
        .route("/students/{id}/view", get(view))
        .route("/students/{id}/dashboard", get(dashboard))
        .route("/students/{id}/survey", post(survey))
        .with_state(engine)
}

async fn create_session(State(engine): Shared, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let form: Value = body(&bytes)?;
    Ok((StatusCode::CREATED, Json(engine.create_session(&form)?)))
}

async fn register_student(State(engine): Shared, Path(id): Path<String>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let form: Value = body(&bytes)?;
    Ok((StatusCode::CREATED, Json(engine.register_student(&id, &form)?)))
}

async fn close_session(State(engine): Shared, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(engine.close_session(&id)?))
}

async fn export(State(engine): Shared, Path(id): Path<String>, Query(q): Query<ExportQuery>) -> ApiResult<Response> {
    let pseudo = matches!(q.pseudo.as_deref(), Some("1" | "true" | "yes"));
    let dataset = engine.export(&id, pseudo)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], dataset.to_jsonl()).into_response())
}

async fn submit_action(
    State(engine): Shared,
    Path(id): Path<String>,
    Query(q): Query<LangQuery>,
    bytes: Bytes,
) -> ApiResult<impl IntoResponse> {
    let lang = q.lang()?;
    let request: ActionRequest = body(&bytes)?;
    Ok(Json(engine.submit_action(&id, request, lang)?))
}

async fn navigate(
    State(engine): Shared,
    Path(id): Path<String>,
    Query(q): Query<LangQuery>,
    bytes: Bytes,
) -> ApiResult<impl IntoResponse> {
    let lang = q.lang()?;
    let request: NavigateRequest = body(&bytes)?;
    Ok(Json(engine.navigate(&id, request, lang)?))
}

async fn view(State(engine): Shared, Path(id): Path<String>, Query(q): Query<LangQuery>) -> ApiResult<impl IntoResponse> {
    Ok(Json(engine.view(&id, q.lang()?)?))
}

async fn dashboard(State(engine): Shared, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(engine.dashboard(&id)?))
}

async fn survey(
    State(engine): Shared,
    Path(id): Path<String>,
    Query(q): Query<LangQuery>,
    bytes: Bytes,
) -> ApiResult<impl IntoResponse> {
    let lang = q.lang()?;
    let request: SurveyRequest = body(&bytes)?;
    Ok(Json(engine.submit_survey(&id, request, lang)?))
}
