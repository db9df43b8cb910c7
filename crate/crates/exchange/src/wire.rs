//! Record framing shared by the fetch response, the server log and the
//! client state file.
//!
//! Each record is `id: u64 BE`, `published_at: i64 BE`, `len: u32 BE`, then
//! `len` profile bytes. Records appear in strictly increasing id order and
//! ids start at 1.

use thiserror::Error;

pub const HEADER_LEN: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublishedRecord {
    pub record_id: u64,
    /// Epoch seconds.
    pub published_at: i64,
    pub profile: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("offset {offset}: truncated record")]
    Truncated { offset: usize },
    #[error("offset {offset}: record id {id} does not follow {previous}")]
    OutOfOrder { offset: usize, id: u64, previous: u64 },
}

pub fn encode_record(record: &PublishedRecord, out: &mut Vec<u8>) {
    let len = u32::try_from(record.profile.len()).expect("profile larger than 4 GiB");
    out.extend_from_slice(&record.record_id.to_be_bytes());
    out.extend_from_slice(&record.published_at.to_be_bytes());
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(&record.profile);
}

pub fn encode_records<'a>(records: impl IntoIterator<Item = &'a PublishedRecord>) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        encode_record(r, &mut out);
    }
    out
}

pub fn decode_records(bytes: &[u8]) -> Result<Vec<PublishedRecord>, WireError> {
    let (records, used, err) = decode_prefix(bytes, 0);
    match err {
        Some(e) => Err(e),
        None => {
            debug_assert_eq!(used, bytes.len());
            Ok(records)
        }
    }
}

/// Decodes as many whole records as possible. Returns them, the number of
/// bytes they span and the error that stopped decoding, if any. Ids must
/// exceed `after`.
pub(crate) fn decode_prefix(bytes: &[u8], after: u64) -> (Vec<PublishedRecord>, usize, Option<WireError>) {
    let mut records = Vec::new();
    let mut offset = 0;
    let mut previous = after;
    while offset < bytes.len() {
        let rest = &bytes[offset..];
        if rest.len() < HEADER_LEN {
            return (records, offset, Some(WireError::Truncated { offset }));
        }
        let id = u64::from_be_bytes(rest[0..8].try_into().unwrap());
        let published_at = i64::from_be_bytes(rest[8..16].try_into().unwrap());
        let len = u32::from_be_bytes(rest[16..20].try_into().unwrap()) as usize;
        if rest.len() - HEADER_LEN < len {
            return (records, offset, Some(WireError::Truncated { offset }));
        }
        if id <= previous {
            return (records, offset, Some(WireError::OutOfOrder { offset, id, previous }));
        }
        records.push(PublishedRecord { record_id: id, published_at, profile: rest[HEADER_LEN..HEADER_LEN + len].to_vec() });
        previous = id;
        offset += HEADER_LEN + len;
    }
    (records, offset, None)
}
