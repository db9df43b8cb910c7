//! Append-only record store.
//!
//! Publishes serialize through one writer: the frame is appended and synced
//! before the record becomes visible, so an acknowledged id is durable and a
//! failed append leaves nothing behind. Reopening replays the log; a torn
//! final frame from an interrupted write is cut off.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use sha2::{Digest, Sha256};
use thiserror::Error;
use vcontact_core::{parse_processed_profile, ParseError};

use crate::wire::{decode_prefix, encode_record, PublishedRecord, WireError};

pub const LOG_FILE: &str = "records.log";
pub const DEFAULT_RETENTION_SECS: i64 = 28 * 24 * 3600;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid profile: {0}")]
    Invalid(#[from] ParseError),
    #[error("storage: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt log: {0}")]
    Corrupt(#[from] WireError),
}

/// Where accepted frames go.
pub trait LogSink: Send {
    fn append(&mut self, frame: &[u8]) -> io::Result<()>;
}

/// A log file. A failed append truncates back to the last whole frame.
pub struct FileLog {
    file: File,
    len: u64,
}

impl LogSink for FileLog {
    fn append(&mut self, frame: &[u8]) -> io::Result<()> {
        let result = self.file.write_all(frame).and_then(|()| self.file.sync_data());
        match result {
            Ok(()) => {
                self.len += frame.len() as u64;
                Ok(())
            }
            Err(e) => {
                let _ = self.file.set_len(self.len);
                let _ = self.file.seek(SeekFrom::Start(self.len));
                Err(e)
            }
        }
    }
}

/// Discards frames; for stores that need not outlive the process.
pub struct NullLog;

impl LogSink for NullLog {
    fn append(&mut self, _frame: &[u8]) -> io::Result<()> {
        Ok(())
    }
}

struct Writer {
    sink: Box<dyn LogSink>,
    by_hash: HashMap<[u8; 32], u64>,
    next_id: u64,
}

pub struct Store {
    writer: Mutex<Writer>,
    records: RwLock<Vec<Arc<PublishedRecord>>>,
    retention: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Published {
    pub record_id: u64,
    /// False when the bytes were already stored.
    pub created: bool,
}

fn digest(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

impl Store {
    /// Opens or creates `dir/records.log`.
    pub fn open(dir: &Path, retention: i64) -> Result<Store, StoreError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(LOG_FILE);
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(&path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let (records, used, err) = decode_prefix(&bytes, 0);
        match err {
            None => {}
            Some(WireError::Truncated { offset }) => {
                log::warn!("{}: dropping torn frame at byte {offset}", path.display());
                file.set_len(used as u64)?;
                file.sync_data()?;
            }
            Some(e) => return Err(e.into()),
        }
        Ok(Store::with_sink(Box::new(FileLog { file, len: used as u64 }), records, retention))
    }

    pub fn in_memory(retention: i64) -> Store {
        Store::with_sink(Box::new(NullLog), Vec::new(), retention)
    }

    /// A store over `sink` already holding `records` (ascending ids).
    pub fn with_sink(sink: Box<dyn LogSink>, records: Vec<PublishedRecord>, retention: i64) -> Store {
        let by_hash = records.iter().map(|r| (digest(&r.profile), r.record_id)).collect();
        let next_id = records.last().map_or(1, |r| r.record_id + 1);
        Store {
            writer: Mutex::new(Writer { sink, by_hash, next_id }),
            records: RwLock::new(records.into_iter().map(Arc::new).collect()),
            retention,
        }
    }

    /// Stores a processed profile file, or returns the id it already has.
    pub fn publish(&self, bytes: &[u8], now: i64) -> Result<Published, StoreError> {
        parse_processed_profile(bytes)?;
        let hash = digest(bytes);
        let mut w = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(&record_id) = w.by_hash.get(&hash) {
            return Ok(Published { record_id, created: false });
        }
        let record = PublishedRecord { record_id: w.next_id, published_at: now, profile: bytes.to_vec() };
        let mut frame = Vec::with_capacity(bytes.len() + crate::wire::HEADER_LEN);
        encode_record(&record, &mut frame);
        w.sink.append(&frame)?;
        w.next_id += 1;
        w.by_hash.insert(hash, record.record_id);
        let record_id = record.record_id;
        self.records.write().unwrap_or_else(|e| e.into_inner()).push(Arc::new(record));
        Ok(Published { record_id, created: true })
    }

    /// Records after `since` still inside the retention window, ascending.
    pub fn fetch_since(&self, since: u64, now: i64) -> Vec<Arc<PublishedRecord>> {
        let records = self.records.read().unwrap_or_else(|e| e.into_inner());
        let from = records.partition_point(|r| r.record_id <= since);
        records[from..].iter().filter(|r| now - r.published_at <= self.retention).cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.records.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
