//! Publication server and syncing client for processed profiles.

pub mod client;
pub mod server;
pub mod state;
pub mod store;
pub mod wire;

pub use client::{client_sync, HttpTransport, RetryPolicy, SyncConfig, SyncError, SyncOutcome, Transport, TransportError};
pub use server::{router, serve, system_clock, AppState, Clock, TOKEN_ENV, TOKEN_HEADER};
pub use state::{StateError, SyncState};
pub use store::{FileLog, LogSink, NullLog, Published, Store, StoreError, DEFAULT_RETENTION_SECS};
pub use wire::{decode_records, encode_records, PublishedRecord, WireError};
