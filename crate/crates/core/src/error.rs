use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol id {id} is outside an alphabet of {size} symbols")]
    SymbolOutOfRange { id: usize, size: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("coordinate {0} lies outside [0, 1]")]
    CoordinateRange(String),

    #[error("alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },

    #[error("expected a {expected} atom")]
    WrongAtomKind { expected: &'static str },

    #[error("parameter `{name}` = {value} is outside {range}")]
    Parameter {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },

    #[error("no consistent concept up to size {0}")]
    NoConsistentConcept(usize),

    #[error("the instance is satisfiable under all assumptions")]
    Satisfiable,

    #[error("the sampled concepts cannot be distinguished")]
    CannotDistinguish,

    #[error("answer carries nonce {got}, but the pending query has nonce {expected}")]
    StaleNonce { expected: u64, got: u64 },

    #[error("no query is pending")]
    NoPendingQuery,

    #[error("the pending query expects a {expected} answer")]
    AnswerKind { expected: &'static str },

    #[error("the hypothesis already labels the counterexample that way")]
    NotACounterexample,

    #[error("the session has finished")]
    Finished,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn malformed(what: &'static str, detail: impl ToString) -> Self {
        Error::Malformed {
            what,
            detail: detail.to_string(),
        }
    }

    pub(crate) fn parameter(name: &'static str, value: impl ToString, range: &'static str) -> Self {
        Error::Parameter {
            name,
            value: value.to_string(),
            range,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
