use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};

use crate::config::SessionConfig;
use crate::error::{Result, SessionError};
use crate::session::{Session, Snapshot};

/// All live sessions, each behind its own lock, optionally persisted as one
/// JSON snapshot per session.
pub struct SessionStore {
    dir: Option<PathBuf>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next: Mutex<u64>,
}

fn lock<T>(m: &Mutex<T>) -> Result<MutexGuard<'_, T>> {
    m.lock()
        .map_err(|_| SessionError::Internal("a session lock was poisoned".into()))
}

impl SessionStore {
    pub fn in_memory() -> Self {
        SessionStore {
            dir: None,
            sessions: Mutex::new(HashMap::new()),
            next: Mutex::new(1),
        }
    }

    /// Loads every snapshot in `dir` and persists future changes there.
    pub fn persistent(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        let io = |path: &Path, source| SessionError::Snapshot {
            path: path.display().to_string(),
            source,
        };
        fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
        let mut sessions = HashMap::new();
        let mut next = 1;
        for entry in fs::read_dir(&dir).map_err(|e| io(&dir, e))? {
            let path = entry.map_err(|e| io(&dir, e))?.path();
            if path.extension().is_none_or(|x| x != "json") {
                continue;
            }
            let text = fs::read_to_string(&path).map_err(|e| io(&path, e))?;
            let snapshot: Snapshot = serde_json::from_str(&text).map_err(memrep_core::Error::from)?;
            if let Ok(n) = snapshot.id.parse::<u64>() {
                next = next.max(n + 1);
            }
            let session = Session::restore(snapshot)?;
            sessions.insert(session.id().to_string(), Arc::new(Mutex::new(session)));
        }
        Ok(SessionStore {
            dir: Some(dir),
            sessions: Mutex::new(sessions),
            next: Mutex::new(next),
        })
    }

    pub fn create(&self, config: SessionConfig) -> Result<Arc<Mutex<Session>>> {
        let id = {
            let mut next = lock(&self.next)?;
            let id = *next;
            *next += 1;
            id.to_string()
        };
        let session = Session::new(id.clone(), config)?;
        self.save(&session)?;
        let handle = Arc::new(Mutex::new(session));
        lock(&self.sessions)?.insert(id, handle.clone());
        Ok(handle)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>> {
        lock(&self.sessions)?
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::NotFound(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().map(|s| s.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes the session's snapshot, replacing the previous one atomically.
    pub fn save(&self, session: &Session) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(format!("{}.json", session.id()));
        let tmp = dir.join(format!("{}.json.tmp", session.id()));
        let text = serde_json::to_string_pretty(&session.snapshot()).map_err(memrep_core::Error::from)?;
        let io = |source| SessionError::Snapshot {
            path: path.display().to_string(),
            source,
        };
        fs::write(&tmp, text).map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)
    }
}

/// Runs `f` on the locked session; the lock serializes all operations on
/// one session.
pub fn with_session<T>(session: &Mutex<Session>, f: impl FnOnce(&mut Session) -> Result<T>) -> Result<T> {
    let mut guard = lock(session)?;
    f(&mut guard)
}
