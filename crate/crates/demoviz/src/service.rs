//! Stateless HTTP API.
//!
//! Every request carries the full chart; nothing is kept between requests.
//! Bodies are decoded by hand so malformed input gets the same
//! `{code, message, details}` error shape as every other failure.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use demoviz_core::json::to_canonical_string;
use demoviz_core::Compiler;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;
use tower_http::cors::CorsLayer;

use crate::api::{self, ApiError, ErrorKind, TargetChoice};

pub const DEFAULT_HOST: &str = "127.0.0.1";
pub const DEFAULT_PORT: u16 = 7878;

/// Header set on compile responses when `auto` fell back to Vega.
pub const FALLBACK_HEADER: &str = "x-demoviz-fallback";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuggestRequest {
    #[serde(default)]
    version: Option<u32>,
    chart: Value,
    trace: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompileRequest {
    #[serde(default)]
    version: Option<u32>,
    chart: Value,
    interactions: Value,
    #[serde(default)]
    target: TargetChoice,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WidgetsRequest {
    #[serde(default)]
    version: Option<u32>,
    chart: Value,
    #[serde(default)]
    dataset: Option<String>,
    field: String,
}

pub fn router(compiler: Arc<Compiler>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/suggest", post(suggest))
        .route("/api/compile", post(compile))
        .route("/api/widgets", post(widgets))
        .layer(CorsLayer::permissive())
        .with_state(compiler)
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(e: &ApiError) -> Response {
    let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    json_response(status, e.body())
}

fn decode<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::malformed(format!("request body: {e}")))
}

fn check_version(version: Option<u32>) -> Result<(), ApiError> {
    match version {
        Some(v) if v != demoviz_core::FORMAT_VERSION => Err(ApiError::new(
            ErrorKind::Malformed,
            "UnsupportedVersion",
            format!(
                "unsupported version {v} (expected {})",
                demoviz_core::FORMAT_VERSION
            ),
        )),
        _ => Ok(()),
    }
}

async fn health(State(compiler): State<Arc<Compiler>>) -> Response {
    json_response(StatusCode::OK, to_canonical_string(&api::health(&compiler)))
}

async fn suggest(body: Bytes) -> Response {
    match handle_suggest(&body) {
        Ok(body) => json_response(StatusCode::OK, body),
        Err(e) => error_response(&e),
    }
}

fn handle_suggest(body: &[u8]) -> Result<String, ApiError> {
    let req: SuggestRequest = decode(body)?;
    check_version(req.version)?;
    let chart = api::chart_from_value(&req.chart)?;
    let trace = api::trace_from_str(&req.trace.to_string())?;
    Ok(api::suggest(&chart, &trace)?.to_json())
}

async fn compile(State(compiler): State<Arc<Compiler>>, body: Bytes) -> Response {
    let result = tokio::task::spawn_blocking(move || handle_compile(&compiler, &body)).await;
    match result {
        Ok(Ok((body, fallback))) => {
            let mut response = json_response(StatusCode::OK, body);
            if fallback {
                response
                    .headers_mut()
                    .insert(FALLBACK_HEADER, HeaderValue::from_static("vega"));
            }
            response
        }
        Ok(Err(e)) => error_response(&e),
        Err(e) => error_response(&ApiError::new(
            ErrorKind::Unprocessable,
            "CompileError",
            e.to_string(),
        )),
    }
}

fn handle_compile(compiler: &Compiler, body: &[u8]) -> Result<(String, bool), ApiError> {
    let req: CompileRequest = decode(body)?;
    check_version(req.version)?;
    let chart = api::chart_from_value(&req.chart)?;
    let doc = api::interactions_from_value(&req.interactions)?;
    let compiled = api::compile(compiler, &chart, &doc, req.target)?;
    Ok((compiled.spec.to_json(), compiled.fallback_note.is_some()))
}

async fn widgets(body: Bytes) -> Response {
    match handle_widgets(&body) {
        Ok(body) => json_response(StatusCode::OK, body),
        Err(e) => error_response(&e),
    }
}

fn handle_widgets(body: &[u8]) -> Result<String, ApiError> {
    let req: WidgetsRequest = decode(body)?;
    check_version(req.version)?;
    let chart = api::chart_from_value(&req.chart)?;
    Ok(api::widgets(&chart, req.dataset.as_deref(), &req.field)?.to_json())
}

/// Binds and serves until the process is stopped.
pub async fn serve(compiler: Arc<Compiler>, host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!(
        "demoviz-server listening on http://{}",
        listener.local_addr()?
    );
    axum::serve(listener, router(compiler)).await
}
