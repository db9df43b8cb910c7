//! HTTP front end.
//!
//! `POST /v1/profiles` takes a processed profile file and answers with its
//! record id as text. `GET /v1/profiles?since=<id>` answers with the framed
//! records after `id`.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::Router;
use serde::Deserialize;

use crate::store::{Store, StoreError};
use crate::wire::encode_records;

pub const TOKEN_HEADER: &str = "x-upload-token";
pub const TOKEN_ENV: &str = "VCONTACT_UPLOAD_TOKEN";
const MAX_BODY: usize = 16 << 20;

pub type Clock = Arc<dyn Fn() -> i64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs() as i64)
    })
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    /// Required value of the upload token header, if any.
    pub token: Option<String>,
    pub clock: Clock,
}

impl AppState {
    pub fn new(store: Arc<Store>, token: Option<String>) -> Self {
        AppState { store, token, clock: system_clock() }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/profiles", post(publish).get(fetch))
        .layer(DefaultBodyLimit::max(MAX_BODY))
        .with_state(state)
}

pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

async fn publish(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    if let Some(expected) = &state.token {
        let given = headers.get(TOKEN_HEADER).and_then(|v| v.to_str().ok());
        if given != Some(expected.as_str()) {
            return (StatusCode::UNAUTHORIZED, "missing or wrong upload token\n").into_response();
        }
    }
    let store = state.store.clone();
    let now = (state.clock)();
    let result = tokio::task::spawn_blocking(move || store.publish(&body, now)).await;
    match result {
        Ok(Ok(p)) => {
            let status = if p.created { StatusCode::CREATED } else { StatusCode::OK };
            (status, p.record_id.to_string()).into_response()
        }
        Ok(Err(StoreError::Invalid(e))) => (StatusCode::BAD_REQUEST, format!("{e}\n")).into_response(),
        Ok(Err(e)) => {
            log::error!("publish failed: {e}");
            (StatusCode::INTERNAL_SERVER_ERROR, "storage failure\n").into_response()
        }
        Err(e) => {
            log::error!("publish task failed: {e}");
            (StatusCode::INTERNAL_SERVER_ERROR, "storage failure\n").into_response()
        }
    }
}

#[derive(Deserialize)]
struct Since {
    #[serde(default)]
    since: u64,
}

async fn fetch(State(state): State<AppState>, query: Result<Query<Since>, axum::extract::rejection::QueryRejection>) -> Response {
    let Ok(Query(Since { since })) = query else {
        return (StatusCode::BAD_REQUEST, "since must be a non-negative integer\n").into_response();
    };
    let records = state.store.fetch_since(since, (state.clock)());
    let body = encode_records(records.iter().map(|r| r.as_ref()));
    ([(header::CONTENT_TYPE, "application/octet-stream")], body).into_response()
}
