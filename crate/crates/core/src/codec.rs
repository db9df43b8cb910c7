//! Line-oriented profile file format.
//!
//! ```text
//! vcontact/1 signal [tag=<percent-encoded>]
//! t=<epoch> <id_hex>:<rssi> ...
//!
//! vcontact/1 processed [label=<percent-encoded>]
//! t=<start>..<end> <id_hex>:<min>..<max> ...
//! ```
//!
//! Every line, including the last, ends in `\n`. IDs within a record are
//! sorted and unique; serialization is canonical, so equal profiles always
//! produce identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

use crate::model::{
    ProcessedProfile, ProcessedVector, Rssi, RssiRange, Segment, SignalId, SignalProfile,
    SignalVector, Timestamp,
};

pub const MAGIC: &str = "vcontact/1";

const TEXT_FIELD: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// A parse failure, naming the line (1-based) and field at fault.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {field}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub field: &'static str,
    pub reason: String,
}

impl ParseError {
    fn new(line: usize, field: &'static str, reason: impl Into<String>) -> Self {
        ParseError { line, field, reason: reason.into() }
    }
}

/// Either kind of profile file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Profile {
    Signal(SignalProfile),
    Processed(ProcessedProfile),
}

impl Profile {
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Profile::Signal(p) => serialize_signal_profile(p).into_bytes(),
            Profile::Processed(p) => serialize_processed_profile(p).into_bytes(),
        }
    }
}

impl From<SignalProfile> for Profile {
    fn from(p: SignalProfile) -> Self {
        Profile::Signal(p)
    }
}

impl From<ProcessedProfile> for Profile {
    fn from(p: ProcessedProfile) -> Self {
        Profile::Processed(p)
    }
}

pub fn serialize_signal_profile(profile: &SignalProfile) -> String {
    let mut out = String::with_capacity(32 + profile.len() * 64);
    out.push_str(MAGIC);
    out.push_str(" signal");
    if let Some(tag) = profile.device_tag() {
        let _ = write!(out, " tag={}", utf8_percent_encode(tag, TEXT_FIELD));
    }
    out.push('\n');
    for v in profile.vectors() {
        let _ = write!(out, "t={}", v.timestamp());
        for (id, rssi) in v.iter() {
            let _ = write!(out, " {}:{}", id, rssi.dbm());
        }
        out.push('\n');
    }
    out
}

pub fn serialize_processed_profile(profile: &ProcessedProfile) -> String {
    let mut out = String::with_capacity(32 + profile.len() * 128);
    out.push_str(MAGIC);
    out.push_str(" processed");
    if !profile.case_label().is_empty() {
        let _ = write!(out, " label={}", utf8_percent_encode(profile.case_label(), TEXT_FIELD));
    }
    out.push('\n');
    for s in profile.segments() {
        let _ = write!(out, "t={}..{}", s.start(), s.end());
        for (id, r) in s.vector().iter() {
            let _ = write!(out, " {}:{}..{}", id, r.min().dbm(), r.max().dbm());
        }
        out.push('\n');
    }
    out
}

/// Parses either profile kind, dispatching on the header.
pub fn parse_profile(bytes: &[u8]) -> Result<Profile, ParseError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| ParseError::new(0, "encoding", format!("not UTF-8: {e}")))?;
    let mut lines = split_lines(text)?;
    let (_, header) = lines.next().ok_or_else(|| ParseError::new(1, "header", "missing header"))?;
    let mut tokens = header.split(' ');
    if tokens.next() != Some(MAGIC) {
        return Err(ParseError::new(1, "header", format!("expected {MAGIC:?}")));
    }
    let kind = tokens.next().ok_or_else(|| ParseError::new(1, "kind", "missing profile kind"))?;
    let extra = tokens.next();
    if tokens.next().is_some() {
        return Err(ParseError::new(1, "header", "unexpected trailing fields"));
    }
    match kind {
        "signal" => {
            let tag = extra.map(|t| decode_text(t, "tag=", "tag")).transpose()?;
            let mut vectors: Vec<SignalVector> = Vec::new();
            for (line, record) in lines {
                let v = parse_signal_record(line, record)?;
                if vectors.last().is_some_and(|prev| prev.timestamp() >= v.timestamp()) {
                    return Err(ParseError::new(line, "t", "timestamps must be strictly increasing"));
                }
                vectors.push(v);
            }
            SignalProfile::new(vectors, tag)
                .map(Profile::Signal)
                .map_err(|e| ParseError::new(0, "t", e.to_string()))
        }
        "processed" => {
            let label = extra.map(|t| decode_text(t, "label=", "label")).transpose()?.unwrap_or_default();
            let mut segments = Vec::new();
            let mut last_start = Timestamp::MIN;
            for (line, record) in lines {
                let seg = parse_processed_record(line, record)?;
                if seg.start() < last_start {
                    return Err(ParseError::new(line, "tStart", "segments not ordered by start time"));
                }
                last_start = seg.start();
                segments.push(seg);
            }
            ProcessedProfile::new(segments, label)
                .map(Profile::Processed)
                .map_err(|e| ParseError::new(0, "segments", e.to_string()))
        }
        other => Err(ParseError::new(1, "kind", format!("unknown profile kind {other:?}"))),
    }
}

pub fn parse_signal_profile(bytes: &[u8]) -> Result<SignalProfile, ParseError> {
    match parse_profile(bytes)? {
        Profile::Signal(p) => Ok(p),
        Profile::Processed(_) => Err(ParseError::new(1, "kind", "expected a signal profile")),
    }
}

pub fn parse_processed_profile(bytes: &[u8]) -> Result<ProcessedProfile, ParseError> {
    match parse_profile(bytes)? {
        Profile::Processed(p) => Ok(p),
        Profile::Signal(_) => Err(ParseError::new(1, "kind", "expected a processed profile")),
    }
}

fn split_lines(text: &str) -> Result<impl Iterator<Item = (usize, &str)>, ParseError> {
    if text.is_empty() {
        return Err(ParseError::new(1, "header", "empty input"));
    }
    let body = text.strip_suffix('\n').ok_or_else(|| {
        let line = text.matches('\n').count() + 1;
        ParseError::new(line, "record", "missing terminating newline (truncated input?)")
    })?;
    Ok(body.split('\n').enumerate().map(|(i, l)| (i + 1, l)))
}

fn decode_text(token: &str, prefix: &str, field: &'static str) -> Result<String, ParseError> {
    let raw = token
        .strip_prefix(prefix)
        .ok_or_else(|| ParseError::new(1, field, format!("expected {prefix}<value>")))?;
    percent_decode_str(raw)
        .decode_utf8()
        .map(|s| s.into_owned())
        .map_err(|e| ParseError::new(1, field, e.to_string()))
}

fn parse_int<T: std::str::FromStr>(s: &str, line: usize, field: &'static str) -> Result<T, ParseError> {
    s.parse().map_err(|_| ParseError::new(line, field, format!("invalid integer {s:?}")))
}

fn parse_rssi(s: &str, line: usize, field: &'static str) -> Result<Rssi, ParseError> {
    let v: i32 = parse_int(s, line, field)?;
    Rssi::new(v).map_err(|e| ParseError::new(line, field, e.to_string()))
}

fn record_tokens(record: &str, line: usize) -> Result<(&str, std::str::Split<'_, char>), ParseError> {
    let mut tokens = record.split(' ');
    let first = tokens.next().unwrap_or_default();
    let time = first
        .strip_prefix("t=")
        .ok_or_else(|| ParseError::new(line, "t", "record must start with t="))?;
    Ok((time, tokens))
}

fn split_entry(token: &str, line: usize) -> Result<(SignalId, &str), ParseError> {
    if token.is_empty() {
        return Err(ParseError::new(line, "record", "empty field (repeated space?)"));
    }
    let (id, value) = token
        .split_once(':')
        .ok_or_else(|| ParseError::new(line, "id", format!("expected <id>:<value>, got {token:?}")))?;
    let id = SignalId::from_hex(id).map_err(|e| ParseError::new(line, "id", e.to_string()))?;
    Ok((id, value))
}

fn check_sorted(prev: Option<SignalId>, id: SignalId, line: usize) -> Result<(), ParseError> {
    if prev.is_some_and(|p| p >= id) {
        return Err(ParseError::new(line, "id", "signal ids must be unique and sorted"));
    }
    Ok(())
}

fn parse_signal_record(line: usize, record: &str) -> Result<SignalVector, ParseError> {
    let (time, tokens) = record_tokens(record, line)?;
    let t: Timestamp = parse_int(time, line, "t")?;
    let mut readings = BTreeMap::new();
    let mut prev = None;
    for token in tokens {
        let (id, value) = split_entry(token, line)?;
        check_sorted(prev, id, line)?;
        prev = Some(id);
        readings.insert(id, parse_rssi(value, line, "rssi")?);
    }
    Ok(SignalVector::new(t, readings))
}

fn parse_processed_record(line: usize, record: &str) -> Result<Segment, ParseError> {
    let (time, tokens) = record_tokens(record, line)?;
    let (start, end) = time
        .split_once("..")
        .ok_or_else(|| ParseError::new(line, "t", "expected t=<start>..<end>"))?;
    let start: Timestamp = parse_int(start, line, "tStart")?;
    let end: Timestamp = parse_int(end, line, "tEnd")?;
    let mut ranges = BTreeMap::new();
    let mut prev = None;
    for token in tokens {
        let (id, value) = split_entry(token, line)?;
        check_sorted(prev, id, line)?;
        prev = Some(id);
        let (lo, hi) = value
            .split_once("..")
            .ok_or_else(|| ParseError::new(line, "rssiMin", "expected <min>..<max>"))?;
        let lo = parse_rssi(lo, line, "rssiMin")?;
        let hi = parse_rssi(hi, line, "rssiMax")?;
        let range = RssiRange::new(lo, hi).map_err(|e| ParseError::new(line, "rssiMin", e.to_string()))?;
        ranges.insert(id, range);
    }
    if start >= end {
        return Err(ParseError::new(line, "tEnd", format!("window [{start}, {end}] is empty")));
    }
    Segment::new(ProcessedVector::new(ranges), start, end)
        .map_err(|e| ParseError::new(line, "tEnd", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(n: u8) -> SignalId {
        SignalId::from_bytes([n; 32])
    }

    fn vector(t: Timestamp, readings: &[(u8, i32)]) -> SignalVector {
        SignalVector::from_raw(t, readings.iter().map(|&(n, r)| (id(n), r))).unwrap()
    }

    #[test]
    fn empty_signal_profile_round_trips() {
        let p = SignalProfile::default();
        let bytes = serialize_signal_profile(&p);
        assert_eq!(bytes, "vcontact/1 signal\n");
        assert_eq!(parse_signal_profile(bytes.as_bytes()).unwrap(), p);
    }

    #[test]
    fn two_vector_profile_round_trips() {
        let p = SignalProfile::new(
            vec![vector(10, &[(2, -50), (1, -70)]), vector(20, &[])],
            Some("pixel 7 / lab".into()),
        )
        .unwrap();
        let bytes = serialize_signal_profile(&p);
        assert_eq!(parse_profile(bytes.as_bytes()).unwrap(), Profile::Signal(p));
        assert!(bytes.contains("tag=pixel%207%20%2F%20lab"));
    }

    #[test]
    fn ids_written_in_sorted_order() {
        let p = SignalProfile::new(vec![vector(0, &[(9, -1), (3, -2)])], None).unwrap();
        let text = serialize_signal_profile(&p);
        let line = text.lines().nth(1).unwrap();
        assert!(line.find(&id(3).to_hex()).unwrap() < line.find(&id(9).to_hex()).unwrap());
    }

    #[test]
    fn processed_profile_round_trips() {
        let mut ranges = BTreeMap::new();
        ranges.insert(id(1), RssiRange::new(Rssi::new(-80).unwrap(), Rssi::new(-60).unwrap()).unwrap());
        let seg = Segment::new(ProcessedVector::new(ranges), -5, 1800).unwrap();
        let p = ProcessedProfile::new(vec![seg], "case 17").unwrap();
        let bytes = serialize_processed_profile(&p);
        assert_eq!(parse_processed_profile(bytes.as_bytes()).unwrap(), p);
    }

    #[test]
    fn inverted_range_rejected_naming_field() {
        let text = format!("vcontact/1 processed\nt=0..10 {}:-50..-60\n", id(1).to_hex());
        let err = parse_profile(text.as_bytes()).unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.field, "rssiMin");
    }

    #[test]
    fn non_increasing_timestamps_rejected() {
        let text = "vcontact/1 signal\nt=5\nt=5\n";
        let err = parse_profile(text.as_bytes()).unwrap_err();
        assert_eq!(err.field, "t");
        assert_eq!(err.line, 3);
    }

    #[test]
    fn malformed_inputs_rejected() {
        let good_id = id(1).to_hex();
        let cases = [
            "".to_string(),
            "vcontact/2 signal\n".to_string(),
            "vcontact/1 banana\n".to_string(),
            "vcontact/1 signal".to_string(),
            "vcontact/1 signal\nt=1".to_string(),
            format!("vcontact/1 signal\nt=1 {good_id}:-101\n"),
            format!("vcontact/1 signal\nt=1 {good_id}:5\n"),
            format!("vcontact/1 signal\nt=1  {good_id}:-5\n"),
            format!("vcontact/1 signal\nt=1 {good_id}:-5 {good_id}:-6\n"),
            format!("vcontact/1 signal\nt=1 {}:-5\n", id(0xab).to_hex().to_uppercase()),
            "vcontact/1 processed\nt=10..10\n".to_string(),
            "vcontact/1 processed\nt=10..20\nt=5..30\n".to_string(),
            "vcontact/1 signal extra=1\n".to_string(),
            "vcontact/1 signal tag=a b\n".to_string(),
        ];
        for c in cases {
            assert!(parse_profile(c.as_bytes()).is_err(), "accepted {c:?}");
        }
    }

    #[test]
    fn truncated_bytes_rejected() {
        let p = SignalProfile::new(vec![vector(1, &[(1, -40), (2, -41)])], None).unwrap();
        let bytes = serialize_signal_profile(&p).into_bytes();
        for cut in 1..bytes.len() {
            if bytes[cut - 1] == b'\n' {
                continue;
            }
            assert!(parse_profile(&bytes[..cut]).is_err(), "accepted cut at {cut}");
        }
    }

    #[test]
    fn kind_mismatch_rejected() {
        assert!(parse_processed_profile(b"vcontact/1 signal\n").is_err());
        assert!(parse_signal_profile(b"vcontact/1 processed\n").is_err());
    }
}
