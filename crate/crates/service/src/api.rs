//! HTTP/JSON API.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use crate::artifacts::{BASEMAP_JSON, BASEMAP_SVG, HEATMAP_SVG, INTENSITIES_JSON, TERMS_JSON};
use crate::error::{FieldError, ServiceError};
use crate::jobs::JobManager;
use crate::request::{parse_json, BasemapRequest, HeatmapRequest};

pub const DEFAULT_LIMIT: usize = 10;
pub const MAX_LIMIT: usize = 100;

#[derive(Clone)]
pub struct AppState {
    pub jobs: Arc<JobManager>,
}

pub fn router(jobs: Arc<JobManager>) -> Router {
    Router::new()
        .route("/api/basemaps", post(create_basemap))
        .route("/api/basemaps/{file}", get(basemap_file))
        .route("/api/basemaps/{id}/terms.json", get(basemap_terms))
        .route("/api/basemaps/{id}/heatmaps", post(create_heatmap))
        .route("/api/heatmaps/{file}", get(heatmap_file))
        .route("/api/heatmaps/{id}/intensities.json", get(heatmap_intensities))
        .route("/api/jobs/{id}", get(get_job))
        .route("/api/corpus/stats", get(corpus_stats))
        .route("/api/venues", get(venues))
        .route("/api/authors", get(authors))
        .with_state(AppState { jobs })
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        match self {
            ServiceError::Invalid(fields) => invalid(fields),
            ServiceError::NotFound(what) => {
                (StatusCode::NOT_FOUND, Json(json!({ "error": format!("not found: {what}") }))).into_response()
            }
            other => {
                log::error!("{other}");
                (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "error": other.to_string() }))).into_response()
            }
        }
    }
}

fn invalid(fields: Vec<FieldError>) -> Response {
    (StatusCode::BAD_REQUEST, Json(json!({ "error": "invalid request", "fields": fields }))).into_response()
}

fn accepted(job_id: String) -> Response {
    let body = json!({ "job_id": job_id, "status_url": format!("/api/jobs/{job_id}") });
    (StatusCode::ACCEPTED, Json(body)).into_response()
}

fn not_found(what: String) -> Response {
    ServiceError::NotFound(what).into_response()
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f).await.unwrap_or_else(|e| Err(ServiceError::Config(format!("worker task: {e}"))))
}

async fn create_basemap(State(state): State<AppState>, body: Bytes) -> Response {
    let req = match BasemapRequest::from_json(&body) {
        Ok(r) => r,
        Err(fields) => return invalid(fields),
    };
    match state.jobs.submit_basemap(req) {
        Ok(id) => accepted(id),
        Err(e) => e.into_response(),
    }
}

async fn create_heatmap(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Response {
    let req: HeatmapRequest = match parse_json(&body) {
        Ok(r) => r,
        Err(fields) => return invalid(fields),
    };
    match state.jobs.submit_heatmap(&id, req) {
        Ok(job) => accepted(job),
        Err(e) => e.into_response(),
    }
}

async fn get_job(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    match state.jobs.get(&id) {
        Some(job) => Json(job).into_response(),
        None => not_found(format!("job {id}")),
    }
}

fn artifact(state: &AppState, kind: &str, id: &str, file: &str, content_type: &'static str) -> Response {
    match state.jobs.runner().artifacts.read(kind, id, file) {
        Some(bytes) => ([(header::CONTENT_TYPE, content_type)], bytes).into_response(),
        None => not_found(format!("{kind}/{id}/{file}")),
    }
}

const SVG: &str = "image/svg+xml";
const JSON: &str = "application/json";

/// `{id}.svg` for the map, bare `{id}` for the full basemap JSON.
async fn basemap_file(State(state): State<AppState>, Path(file): Path<String>) -> Response {
    match file.strip_suffix(".svg") {
        Some(id) => artifact(&state, "basemaps", id, BASEMAP_SVG, SVG),
        None => artifact(&state, "basemaps", file.strip_suffix(".json").unwrap_or(&file), BASEMAP_JSON, JSON),
    }
}

async fn basemap_terms(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    artifact(&state, "basemaps", &id, TERMS_JSON, JSON)
}

async fn heatmap_file(State(state): State<AppState>, Path(file): Path<String>) -> Response {
    match file.strip_suffix(".svg") {
        Some(id) => artifact(&state, "heatmaps", id, HEATMAP_SVG, SVG),
        None => artifact(&state, "heatmaps", file.strip_suffix(".json").unwrap_or(&file), INTENSITIES_JSON, JSON),
    }
}

async fn heatmap_intensities(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    artifact(&state, "heatmaps", &id, INTENSITIES_JSON, JSON)
}

async fn corpus_stats(State(state): State<AppState>) -> Response {
    let store = Arc::clone(&state.jobs.runner().store);
    match blocking(move || Ok(store.corpus_stats()?)).await {
        Ok(stats) => Json(stats).into_response(),
        Err(e) => e.into_response(),
    }
}

#[derive(Debug, Deserialize)]
pub struct Typeahead {
    #[serde(default)]
    pub q: String,
    pub limit: Option<usize>,
}

impl Typeahead {
    fn limit(&self) -> usize {
        self.limit.unwrap_or(DEFAULT_LIMIT).clamp(1, MAX_LIMIT)
    }
}

async fn venues(State(state): State<AppState>, Query(t): Query<Typeahead>) -> Response {
    let store = Arc::clone(&state.jobs.runner().store);
    let limit = t.limit();
    match blocking(move || Ok(store.venues(&t.q, limit)?)).await {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn authors(State(state): State<AppState>, Query(t): Query<Typeahead>) -> Response {
    let store = Arc::clone(&state.jobs.runner().store);
    let limit = t.limit();
    match blocking(move || Ok(store.authors(&t.q, limit)?)).await {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

/// Serves the API until the process is stopped.
pub async fn serve(jobs: Arc<JobManager>, host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(jobs)).await
}
