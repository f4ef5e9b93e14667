use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::FormRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{Html, IntoResponse, Redirect, Response};
use axum::routing::{get, post};
use axum::{Form, Router};
use shawn_core::markup::PageName;
use shawn_core::rdf_export::{export, ExportError, Format, UriPolicy};
use shawn_core::store::{Store, StoreError};
use tower_http::services::ServeDir;
use tracing::error;

use crate::{api, views};

#[derive(Clone, Debug)]
pub struct AppConfig {
    pub readonly: bool,
    pub base_uri: String,
    /// Built browser client; `/static` answers 404 when absent.
    pub static_dir: Option<PathBuf>,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig { readonly: false, base_uri: crate::DEFAULT_BASE_URI.to_string(), static_dir: None }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub config: Arc<AppConfig>,
}

pub fn router(store: Arc<Store>, config: AppConfig) -> Router {
    let static_dir = config.static_dir.clone().filter(|d| d.is_dir());
    let state = AppState { store, config: Arc::new(config) };
    let mut app = Router::new()
        .route("/", get(|| async { Redirect::to("/wiki/HomePage") }))
        .route("/wiki/{name}", get(view_page).post(save_page))
        .route("/wiki/{name}/edit", get(edit_page))
        .route("/all", get(all_pages))
        .route("/export.rdf", get(export_rdf))
        .route("/api/graph", get(api::graph))
        .route("/api/triples", get(api::triples))
        .route("/api/query", post(api::query));
    if let Some(dir) = static_dir {
        app = app.nest_service("/static", ServeDir::new(dir));
    }
    app.fallback(not_found).with_state(state)
}

/// Everything a handler can fail with, mapped onto the documented statuses.
#[derive(Debug)]
pub enum AppError {
    BadName(String),
    MissingSource,
    /// Body not form-encoded (415) or undecodable (400).
    BadForm(StatusCode, String),
    ReadOnly,
    Storage(StoreError),
    Export(ExportError),
}

impl From<StoreError> for AppError {
    fn from(e: StoreError) -> Self {
        AppError::Storage(e)
    }
}

impl From<ExportError> for AppError {
    fn from(e: ExportError) -> Self {
        AppError::Export(e)
    }
}

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        let (status, message) = match &self {
            AppError::BadName(reason) => (StatusCode::BAD_REQUEST, format!("invalid page name: {reason}")),
            AppError::MissingSource => (StatusCode::BAD_REQUEST, "form field `source` is required".to_string()),
            AppError::BadForm(status, reason) => {
                let status = if *status == StatusCode::UNSUPPORTED_MEDIA_TYPE { *status } else { StatusCode::BAD_REQUEST };
                (status, reason.clone())
            }
            AppError::ReadOnly => (StatusCode::FORBIDDEN, "this wiki is read-only".to_string()),
            AppError::Storage(e) => {
                error!(error = ?e, "storage failure");
                (StatusCode::INTERNAL_SERVER_ERROR, "storage failure".to_string())
            }
            AppError::Export(e) => {
                error!(error = ?e, "export failure");
                (StatusCode::INTERNAL_SERVER_ERROR, "export failure".to_string())
            }
        };
        (status, Html(views::error_page(status, &message))).into_response()
    }
}

pub fn page_name(raw: &str) -> Result<PageName, AppError> {
    PageName::new(raw).map_err(|e| AppError::BadName(e.to_string()))
}

async fn not_found() -> Response {
    let status = StatusCode::NOT_FOUND;
    (status, Html(views::error_page(status, "no such route"))).into_response()
}

async fn view_page(State(state): State<AppState>, Path(raw): Path<String>) -> Result<Html<String>, AppError> {
    let name = page_name(&raw)?;
    let index = state.store.snapshot();
    if index.contains_page(&name) {
        Ok(Html(views::page(&index, &name)))
    } else {
        Ok(Html(views::missing_page(&index, &name, state.config.readonly)))
    }
}

async fn edit_page(State(state): State<AppState>, Path(raw): Path<String>) -> Result<Html<String>, AppError> {
    let name = page_name(&raw)?;
    if state.config.readonly {
        return Err(AppError::ReadOnly);
    }
    let store = state.store.clone();
    let lookup = name.clone();
    let source = tokio::task::spawn_blocking(move || store.load_page(&lookup))
        .await
        .expect("load task panicked")?;
    let index = state.store.snapshot();
    Ok(Html(views::edit_page(&index, &name, source.as_deref().unwrap_or(""))))
}

async fn save_page(
    State(state): State<AppState>,
    Path(raw): Path<String>,
    form: Result<Form<HashMap<String, String>>, FormRejection>,
) -> Result<Redirect, AppError> {
    let name = page_name(&raw)?;
    if state.config.readonly {
        return Err(AppError::ReadOnly);
    }
    let Form(mut form) = form.map_err(|r| AppError::BadForm(r.status(), r.body_text()))?;
    let source = form.remove("source").ok_or(AppError::MissingSource)?;
    let store = state.store.clone();
    let target = name.clone();
    tokio::task::spawn_blocking(move || store.save_page(&target, &source))
        .await
        .expect("save task panicked")?;
    // `Redirect::to` answers 303 See Other.
    Ok(Redirect::to(&shawn_core::markup::page_href(&name)))
}

async fn all_pages(State(state): State<AppState>) -> Html<String> {
    Html(views::all_pages(&state.store.snapshot()))
}

async fn export_rdf(
    State(state): State<AppState>,
    Query(params): Query<HashMap<String, String>>,
    headers: HeaderMap,
) -> Result<Response, AppError> {
    let accept = headers.get(header::ACCEPT).and_then(|v| v.to_str().ok()).unwrap_or("");
    let format = if prefers_turtle(accept) { Format::Turtle } else { Format::NTriples };
    let inferred = params.get("inferred").is_some_and(|v| flag(v));
    let index = state.store.snapshot();
    let policy = UriPolicy::from_wiki(state.config.base_uri.as_str(), &index)?;
    let doc = export(&index, &policy, format, inferred)?;
    Ok(([(header::CONTENT_TYPE, format!("{}; charset=utf-8", format.media_type()))], doc.body).into_response())
}

pub fn flag(v: &str) -> bool {
    matches!(v.to_ascii_lowercase().as_str(), "1" | "true" | "yes" | "on")
}

/// True when the Accept header ranks Turtle strictly above N-Triples.
/// Wildcards count for N-Triples, the default.
pub fn prefers_turtle(accept: &str) -> bool {
    let mut turtle = 0.0f32;
    let mut ntriples = 0.0f32;
    for range in accept.split(',') {
        let mut parts = range.split(';');
        let media = parts.next().unwrap_or("").trim().to_ascii_lowercase();
        let q = parts
            .filter_map(|p| p.trim().strip_prefix("q="))
            .find_map(|q| q.trim().parse::<f32>().ok())
            .unwrap_or(1.0);
        match media.as_str() {
            "text/turtle" | "application/x-turtle" => turtle = turtle.max(q),
            "application/n-triples" | "text/plain" | "*/*" | "text/*" | "application/*" => ntriples = ntriples.max(q),
            _ => {}
        }
    }
    turtle > ntriples
}
