//! Device-side sync: fetch new records, match locally, then advance the
//! cursor. Only the cursor goes upstream.

use std::fs::OpenOptions;
use std::path::Path;
use std::thread;
use std::time::Duration;

use thiserror::Error;
use vcontact_core::{match_and_notify, parse_processed_profile, ContactReport, DetectionConfig, ParseError, SignalProfile};

use crate::server::TOKEN_HEADER;
use crate::state::{StateError, SyncState};
use crate::wire::{decode_records, WireError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("unreachable: {0}")]
    Unreachable(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
}

impl TransportError {
    fn is_transient(&self) -> bool {
        match self {
            TransportError::Unreachable(_) => true,
            TransportError::Status { status, .. } => *status >= 500,
        }
    }
}

pub trait Transport {
    /// Raw body of `GET /v1/profiles?since=<since>`.
    fn fetch_since(&self, since: u64) -> Result<Vec<u8>, TransportError>;
}

pub struct HttpTransport {
    endpoint: String,
    token: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    /// `endpoint` is the server root, e.g. `http://127.0.0.1:8080`.
    pub fn new(endpoint: &str) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| TransportError::Unreachable(e.to_string()))?;
        Ok(HttpTransport { endpoint: endpoint.trim_end_matches('/').to_string(), token: None, client })
    }

    pub fn with_token(mut self, token: Option<String>) -> Self {
        self.token = token;
        self
    }

    fn url(&self) -> String {
        format!("{}/v1/profiles", self.endpoint)
    }

    pub fn publish(&self, profile: &[u8]) -> Result<u64, TransportError> {
        let mut req = self.client.post(self.url()).body(profile.to_vec());
        if let Some(t) = &self.token {
            req = req.header(TOKEN_HEADER, t);
        }
        let body = send(req)?;
        let text = String::from_utf8_lossy(&body);
        text.trim().parse().map_err(|_| TransportError::Status { status: 200, body: format!("bad record id {text:?}") })
    }
}

fn send(req: reqwest::blocking::RequestBuilder) -> Result<Vec<u8>, TransportError> {
    let resp = req.send().map_err(|e| TransportError::Unreachable(e.to_string()))?;
    let status = resp.status();
    let body = resp.bytes().map_err(|e| TransportError::Unreachable(e.to_string()))?.to_vec();
    if status.is_success() {
        Ok(body)
    } else {
        Err(TransportError::Status { status: status.as_u16(), body: String::from_utf8_lossy(&body).into_owned() })
    }
}

impl Transport for HttpTransport {
    fn fetch_since(&self, since: u64) -> Result<Vec<u8>, TransportError> {
        send(self.client.get(format!("{}?since={since}", self.url())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub initial_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 4, initial_delay: Duration::from_millis(250), max_delay: Duration::from_secs(4) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyncConfig {
    pub detection: DetectionConfig,
    pub retry: RetryPolicy,
}

#[derive(Debug, Error)]
pub enum SyncError {
    #[error("fetch failed after {attempts} attempt(s): {last}")]
    Transport { attempts: u32, last: TransportError },
    #[error("server response: {0}")]
    Wire(#[from] WireError),
    #[error("record {record_id}: {source}")]
    Profile { record_id: u64, source: ParseError },
    #[error(transparent)]
    State(#[from] StateError),
    #[error("another sync holds the state directory")]
    Busy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyncOutcome {
    pub report: ContactReport,
    pub new_records: usize,
    pub cursor: u64,
}

fn fetch_with_retry(transport: &dyn Transport, since: u64, policy: &RetryPolicy) -> Result<Vec<u8>, SyncError> {
    let attempts = policy.attempts.max(1);
    let mut delay = policy.initial_delay;
    let mut n = 0;
    loop {
        n += 1;
        match transport.fetch_since(since) {
            Ok(body) => return Ok(body),
            Err(e) if e.is_transient() && n < attempts => {
                log::warn!("fetch attempt {n} failed: {e}; retrying in {delay:?}");
                thread::sleep(delay);
                delay = (delay * 2).min(policy.max_delay);
            }
            Err(last) => return Err(SyncError::Transport { attempts: n, last }),
        }
    }
}

/// One sync pass for the device whose state lives in `state_dir`.
///
/// Matches `user` against every record held so far plus the new ones. The
/// state file is replaced only after the match pass succeeds, so any error
/// leaves it untouched.
pub fn client_sync(
    state_dir: &Path,
    transport: &dyn Transport,
    user: &SignalProfile,
    cfg: &SyncConfig,
) -> Result<SyncOutcome, SyncError> {
    std::fs::create_dir_all(state_dir).map_err(StateError::from)?;
    let lock = OpenOptions::new()
        .write(true)
        .create(true)
        .truncate(false)
        .open(state_dir.join("sync.lock"))
        .map_err(StateError::from)?;
    if lock.try_lock().is_err() {
        return Err(SyncError::Busy);
    }

    let mut state = SyncState::load(state_dir)?;
    let body = fetch_with_retry(transport, state.cursor, &cfg.retry)?;
    let fresh = decode_records(&body)?;
    if let Some(r) = fresh.first().filter(|r| r.record_id <= state.cursor) {
        return Err(SyncError::Wire(WireError::OutOfOrder { offset: 0, id: r.record_id, previous: state.cursor }));
    }
    let new_records = fresh.len();
    state.records.extend(fresh);
    let published = state
        .records
        .iter()
        .map(|r| parse_processed_profile(&r.profile).map_err(|source| SyncError::Profile { record_id: r.record_id, source }))
        .collect::<Result<Vec<_>, _>>()?;
    let report = match_and_notify(user, &published, &cfg.detection);
    state.cursor = state.records.last().map_or(state.cursor, |r| r.record_id);
    if new_records > 0 {
        state.save(state_dir)?;
    }
    Ok(SyncOutcome { report, new_records, cursor: state.cursor })
}
