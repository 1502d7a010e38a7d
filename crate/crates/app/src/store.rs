use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant, SystemTime};

use pcm_core::MonitorSession;

pub struct Slot {
    pub session: MonitorSession,
    pub created: SystemTime,
    last_used: Instant,
}

/// Live sessions keyed by an opaque id. Each session sits behind its own
/// mutex, so mutations of one session are serialized while distinct
/// sessions proceed independently.
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Slot>>>>,
    idle_expiry: Duration,
}

impl SessionStore {
    pub fn new(idle_expiry: Duration) -> Self {
        Self {
            sessions: RwLock::new(HashMap::new()),
            idle_expiry,
        }
    }

    pub fn insert(&self, session: MonitorSession) -> String {
        self.sweep();
        let id = uuid::Uuid::new_v4().simple().to_string();
        let slot = Slot {
            session,
            created: SystemTime::now(),
            last_used: Instant::now(),
        };
        self.sessions
            .write()
            .expect("store lock")
            .insert(id.clone(), Arc::new(Mutex::new(slot)));
        id
    }

    /// Runs `f` with exclusive access to the session, or returns `None` if
    /// the id is unknown or the session has expired.
    pub fn with<T>(&self, id: &str, f: impl FnOnce(&mut Slot) -> T) -> Option<T> {
        let slot = self.sessions.read().expect("store lock").get(id).cloned()?;
        let mut guard = slot.lock().expect("session lock");
        if guard.last_used.elapsed() > self.idle_expiry {
            drop(guard);
            self.sessions.write().expect("store lock").remove(id);
            return None;
        }
        guard.last_used = Instant::now();
        Some(f(&mut guard))
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn sweep(&self) {
        let expiry = self.idle_expiry;
        self.sessions.write().expect("store lock").retain(|_, slot| {
            slot.try_lock().map_or(true, |s| s.last_used.elapsed() <= expiry)
        });
    }
}
