//! Client sync state: the fetch cursor and every record fetched so far.
//!
//! File layout: `VCSYNC01`, `cursor: u64 BE`, then framed records with ids
//! not above the cursor.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::wire::{decode_records, encode_records, PublishedRecord, WireError};

pub const STATE_FILE: &str = "sync.state";
const MAGIC: &[u8; 8] = b"VCSYNC01";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SyncState {
    pub cursor: u64,
    pub records: Vec<PublishedRecord>,
}

#[derive(Debug, Error)]
pub enum StateError {
    #[error("not a sync state file")]
    BadMagic,
    #[error("state file truncated")]
    Truncated,
    #[error("state records: {0}")]
    Records(#[from] WireError),
    #[error("record {id} is beyond the cursor {cursor}")]
    BeyondCursor { id: u64, cursor: u64 },
    #[error("state file: {0}")]
    Io(#[from] io::Error),
}

impl SyncState {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&self.cursor.to_be_bytes());
        out.extend(encode_records(&self.records));
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<SyncState, StateError> {
        if bytes.len() < 16 {
            return Err(if bytes.starts_with(&MAGIC[..bytes.len().min(8)]) { StateError::Truncated } else { StateError::BadMagic });
        }
        if &bytes[..8] != MAGIC {
            return Err(StateError::BadMagic);
        }
        let cursor = u64::from_be_bytes(bytes[8..16].try_into().unwrap());
        let records = decode_records(&bytes[16..])?;
        if let Some(r) = records.last().filter(|r| r.record_id > cursor) {
            return Err(StateError::BeyondCursor { id: r.record_id, cursor });
        }
        Ok(SyncState { cursor, records })
    }

    pub fn path(dir: &Path) -> PathBuf {
        dir.join(STATE_FILE)
    }

    /// The state in `dir`, or the empty state if there is none yet.
    pub fn load(dir: &Path) -> Result<SyncState, StateError> {
        match fs::read(Self::path(dir)) {
            Ok(bytes) => SyncState::decode(&bytes),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(SyncState::default()),
            Err(e) => Err(e.into()),
        }
    }

    /// Replaces the state file through a synced temporary file and rename.
    pub fn save(&self, dir: &Path) -> Result<(), StateError> {
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!("{STATE_FILE}.tmp"));
        let mut f = OpenOptions::new().write(true).create(true).truncate(true).open(&tmp)?;
        f.write_all(&self.encode())?;
        f.sync_all()?;
        drop(f);
        fs::rename(&tmp, Self::path(dir))?;
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_rejections() {
        let s = SyncState {
            cursor: 7,
            records: vec![PublishedRecord { record_id: 7, published_at: 1, profile: b"x".to_vec() }],
        };
        assert_eq!(SyncState::decode(&s.encode()).unwrap(), s);
        assert!(matches!(SyncState::decode(b"VCSYNC"), Err(StateError::Truncated)));
        assert!(matches!(SyncState::decode(b"nope"), Err(StateError::BadMagic)));
        let beyond = SyncState { cursor: 6, ..s };
        assert!(matches!(SyncState::decode(&beyond.encode()), Err(StateError::BeyondCursor { .. })));
    }

    #[test]
    fn missing_file_is_empty_state() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(SyncState::load(dir.path()).unwrap(), SyncState::default());
        let s = SyncState { cursor: 3, records: vec![] };
        s.save(dir.path()).unwrap();
        assert_eq!(SyncState::load(dir.path()).unwrap(), s);
        assert!(!dir.path().join("sync.state.tmp").exists());
    }
}
