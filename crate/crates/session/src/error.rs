use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("no session `{0}`")]
    NotFound(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid answer: {0}")]
    BadAnswer(String),

    #[error(transparent)]
    Core(#[from] memrep_core::Error),

    #[error("snapshot {path}: {source}")]
    Snapshot {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl SessionError {
    pub fn status(&self) -> StatusCode {
        use memrep_core::Error as Core;
        match self {
            SessionError::NotFound(_) => StatusCode::NOT_FOUND,
            SessionError::Config(_) | SessionError::BadAnswer(_) => StatusCode::BAD_REQUEST,
            SessionError::Core(Core::StaleNonce { .. } | Core::NoPendingQuery | Core::Finished) => StatusCode::CONFLICT,
            SessionError::Core(_) => StatusCode::BAD_REQUEST,
            SessionError::Snapshot { .. } | SessionError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for SessionError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({ "error": self.to_string() }))).into_response()
    }
}

pub type Result<T, E = SessionError> = std::result::Result<T, E>;
