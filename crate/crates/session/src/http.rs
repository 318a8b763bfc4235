//! The JSON/HTTP surface of the session store.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use memrep_core::EntryId;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::SessionConfig;
use crate::error::{Result, SessionError};
use crate::session::Session;
use crate::store::{with_session, SessionStore};

type Store = Arc<SessionStore>;

#[derive(Debug, Deserialize)]
pub struct AnswerBody {
    pub nonce: u64,
    pub answer: Value,
}

#[derive(Debug, Deserialize)]
pub struct RetractBody {
    #[serde(default)]
    pub entries: Vec<EntryId>,
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(info))
        .route("/sessions/{id}/query", get(query))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/retract", post(retract))
        .route("/sessions/{id}/transcript", get(transcript))
        .route("/sessions/{id}/result", get(result))
        .with_state(store)
}

fn parse<T: DeserializeOwned>(body: &Bytes, what: &str) -> Result<T> {
    serde_json::from_slice(body).map_err(|e| SessionError::Config(format!("{what}: {e}")))
}

/// Runs a session operation off the async workers; synthesis can take a while.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T> + Send + 'static) -> Result<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| SessionError::Internal(e.to_string()))?
}

async fn on_session<T: Send + 'static>(
    store: Store,
    id: String,
    f: impl FnOnce(&mut Session, &SessionStore) -> Result<T> + Send + 'static,
) -> Result<T> {
    blocking(move || {
        let handle = store.get(&id)?;
        with_session(&handle, |s| f(s, &store))
    })
    .await
}

async fn create(State(store): State<Store>, body: Bytes) -> Result<Response> {
    let config: SessionConfig = parse(&body, "session config")?;
    let payload = blocking(move || {
        let handle = store.create(config)?;
        with_session(&handle, |s| {
            let state = s.state()?;
            Ok(json!({ "id": s.id(), "legend": s.legend(), "state": state }))
        })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(payload)).into_response())
}

async fn info(State(store): State<Store>, Path(id): Path<String>) -> Result<Json<Value>> {
    on_session(store, id, |s, _| {
        Ok(Json(
            json!({ "id": s.id(), "config": s.config(), "legend": s.legend() }),
        ))
    })
    .await
}

async fn query(State(store): State<Store>, Path(id): Path<String>) -> Result<Response> {
    let state = on_session(store, id, |s, _| s.state()).await?;
    let status = if state.is_finished() {
        StatusCode::CONFLICT
    } else {
        StatusCode::OK
    };
    Ok((status, Json(state)).into_response())
}

async fn answer(State(store): State<Store>, Path(id): Path<String>, body: Bytes) -> Result<Response> {
    let body: AnswerBody = parse(&body, "answer")?;
    let state = on_session(store, id, move |s, store| {
        let state = s.answer(body.nonce, body.answer)?;
        store.save(s)?;
        Ok(state)
    })
    .await?;
    Ok(Json(state).into_response())
}

async fn retract(State(store): State<Store>, Path(id): Path<String>, body: Bytes) -> Result<Response> {
    let body: RetractBody = parse(&body, "retraction")?;
    let state = on_session(store, id, move |s, store| {
        let state = s.retract(body.entries)?;
        store.save(s)?;
        Ok(state)
    })
    .await?;
    Ok(Json(state).into_response())
}

async fn transcript(State(store): State<Store>, Path(id): Path<String>) -> Result<Json<Value>> {
    on_session(store, id, |s, _| {
        Ok(Json(json!({
            "transcript": s.transcript(),
            "summary": s.summary()?,
            "knowledge": s.knowledge()?,
        })))
    })
    .await
}

async fn result(State(store): State<Store>, Path(id): Path<String>) -> Result<Response> {
    let state = on_session(store, id, |s, _| s.state()).await?;
    Ok(match state {
        finished @ crate::SessionState::Finished { .. } => Json(finished).into_response(),
        _ => (
            StatusCode::CONFLICT,
            Json(json!({ "error": "the session is still running" })),
        )
            .into_response(),
    })
}

/// Serves the API on `addr` until the process is interrupted.
pub async fn serve(store: Arc<SessionStore>, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
