use crate::benchmark::TeacherKind;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown benchmark target {0:?}")]
    UnknownTarget(String),
    #[error("a {0:?} teacher cannot teach {1}")]
    Teacher(TeacherKind, &'static str),
    #[error("invalid benchmark: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] memrep_core::Error),
    #[error(transparent)]
    Session(#[from] memrep_session::SessionError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
