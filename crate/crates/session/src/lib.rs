//! Teaching sessions: a person answers the learner's queries over HTTP.
//!
//! Each session wraps one learner. `GET /sessions/{id}/query` shows the
//! pending query, `POST /sessions/{id}/answer` resumes the learner with the
//! reply, and contradictory answers are surfaced for retraction when the
//! learner runs in interactive recovery mode.

mod config;
mod error;
pub mod http;
pub mod render;
mod session;
mod store;

pub use config::{FamilySpec, PriorSpec, SessionConfig};
pub use error::{Result, SessionError};
pub use http::{router, serve};
pub use session::{
    Counts, EntryView, Event, QueryPayload, ResultPayload, Session, SessionState, Snapshot, ViolationView,
    EQUIVALENCE_ANSWERS, MEMBERSHIP_ANSWERS, PREFERENCE_ANSWERS,
};
pub use store::SessionStore;
