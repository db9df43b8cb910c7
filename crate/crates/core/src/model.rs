//! Canonical data types shared by every other module: hashed signal IDs,
//! scans, raw profiles and lifespan-annotated processed profiles.
//!
//! Every type validates its invariants at construction and is immutable
//! afterwards, so values can be shared freely across threads.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::ModelError;

/// Epoch seconds.
pub type Timestamp = i64;

/// Weak-signal floor in dBm. Missing or below-floor readings take this value.
pub const WEAK_SIGNAL_FLOOR: i32 = -100;

/// Strongest representable RSSI in dBm.
pub const RSSI_CEILING: i32 = 0;

/// One-way digest of an access point MAC address.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignalId([u8; 32]);

impl SignalId {
    pub const fn from_bytes(bytes: [u8; 32]) -> Self {
        SignalId(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Lowercase 64-character hex form used in profile files.
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Parses the canonical lowercase hex form. Uppercase digits are rejected
    /// so that every ID has exactly one textual representation.
    pub fn from_hex(s: &str) -> Result<Self, ModelError> {
        if s.len() != 64 || !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(ModelError::InvalidSignalId(s.chars().take(80).collect()));
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out)
            .map_err(|_| ModelError::InvalidSignalId(s.to_string()))?;
        Ok(SignalId(out))
    }
}

impl fmt::Display for SignalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for SignalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignalId({})", &self.to_hex()[..12])
    }
}

fn is_canonical_mac(mac: &str) -> bool {
    let bytes = mac.as_bytes();
    bytes.len() == 17
        && bytes.iter().enumerate().all(|(i, &b)| {
            if i % 3 == 2 {
                b == b':'
            } else {
                matches!(b, b'0'..=b'9' | b'A'..=b'F')
            }
        })
}

/// Hashes a MAC address in canonical `AA:BB:CC:DD:EE:FF` form, prefixed by a
/// deployment-wide salt, into a [`SignalId`].
pub fn hash_mac(mac: &str, salt: &[u8]) -> Result<SignalId, ModelError> {
    if !is_canonical_mac(mac) {
        return Err(ModelError::MalformedMac(mac.chars().take(40).collect()));
    }
    let mut hasher = Sha256::new();
    hasher.update(salt);
    hasher.update(mac.as_bytes());
    Ok(SignalId(hasher.finalize().into()))
}

/// Received signal strength in whole dBm, always within `[-100, 0]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Rssi(i8);

impl Rssi {
    pub const FLOOR: Rssi = Rssi(WEAK_SIGNAL_FLOOR as i8);
    pub const CEILING: Rssi = Rssi(RSSI_CEILING as i8);

    /// Strict constructor: values outside `[-100, 0]` are an error.
    pub fn new(dbm: i32) -> Result<Self, ModelError> {
        if (WEAK_SIGNAL_FLOOR..=RSSI_CEILING).contains(&dbm) {
            Ok(Rssi(dbm as i8))
        } else {
            Err(ModelError::RssiOutOfRange(dbm))
        }
    }

    /// Ingest constructor: saturates into `[-100, 0]`.
    pub fn clamped(raw: i32) -> Self {
        Rssi(raw.clamp(WEAK_SIGNAL_FLOOR, RSSI_CEILING) as i8)
    }

    pub fn dbm(self) -> i32 {
        i32::from(self.0)
    }
}

/// `min(0, max(-100, raw))`.
pub fn clamp_rssi(raw: i32) -> Rssi {
    Rssi::clamped(raw)
}

/// One WiFi scan: hashed AP IDs with their RSSIs at a timestamp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignalVector {
    timestamp: Timestamp,
    readings: BTreeMap<SignalId, Rssi>,
}

impl SignalVector {
    pub fn new(timestamp: Timestamp, readings: BTreeMap<SignalId, Rssi>) -> Self {
        SignalVector { timestamp, readings }
    }

    pub fn empty(timestamp: Timestamp) -> Self {
        Self::new(timestamp, BTreeMap::new())
    }

    /// Builds a scan from raw driver readings, clamping each RSSI into range.
    /// A repeated ID is rejected rather than silently overwritten.
    pub fn from_raw<I>(timestamp: Timestamp, readings: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (SignalId, i32)>,
    {
        let mut map = BTreeMap::new();
        for (id, raw) in readings {
            if map.insert(id, Rssi::clamped(raw)).is_some() {
                return Err(ModelError::DuplicateSignal(id.to_hex()));
            }
        }
        Ok(Self::new(timestamp, map))
    }

    pub fn timestamp(&self) -> Timestamp {
        self.timestamp
    }

    pub fn readings(&self) -> &BTreeMap<SignalId, Rssi> {
        &self.readings
    }

    pub fn get(&self, id: &SignalId) -> Option<Rssi> {
        self.readings.get(id).copied()
    }

    pub fn contains(&self, id: &SignalId) -> bool {
        self.readings.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &SignalId> + '_ {
        self.readings.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SignalId, Rssi)> + '_ {
        self.readings.iter().map(|(id, r)| (id, *r))
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }

    pub fn with_timestamp(mut self, timestamp: Timestamp) -> Self {
        self.timestamp = timestamp;
        self
    }
}

/// Time-ordered scans from one device or one survey walk.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SignalProfile {
    vectors: Vec<SignalVector>,
    device_tag: Option<String>,
}

impl SignalProfile {
    pub fn new(vectors: Vec<SignalVector>, device_tag: Option<String>) -> Result<Self, ModelError> {
        for (i, pair) in vectors.windows(2).enumerate() {
            if pair[1].timestamp <= pair[0].timestamp {
                return Err(ModelError::NonIncreasingTimestamps {
                    index: i + 1,
                    previous: pair[0].timestamp,
                    current: pair[1].timestamp,
                });
            }
        }
        Ok(SignalProfile { vectors, device_tag })
    }

    pub fn vectors(&self) -> &[SignalVector] {
        &self.vectors
    }

    pub fn device_tag(&self) -> Option<&str> {
        self.device_tag.as_deref()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn into_vectors(self) -> Vec<SignalVector> {
        self.vectors
    }
}

/// Closed RSSI interval `[min, max]` for one signal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RssiRange {
    min: Rssi,
    max: Rssi,
}

impl RssiRange {
    pub fn new(min: Rssi, max: Rssi) -> Result<Self, ModelError> {
        if min > max {
            return Err(ModelError::InvertedRange { min: min.dbm(), max: max.dbm() });
        }
        Ok(RssiRange { min, max })
    }

    pub fn point(value: Rssi) -> Self {
        RssiRange { min: value, max: value }
    }

    /// Smallest range covering both readings.
    pub fn spanning(a: Rssi, b: Rssi) -> Self {
        RssiRange { min: a.min(b), max: a.max(b) }
    }

    pub fn min(&self) -> Rssi {
        self.min
    }

    pub fn max(&self) -> Rssi {
        self.max
    }

    pub fn contains(&self, value: Rssi) -> bool {
        self.min <= value && value <= self.max
    }

    /// How far `value` lies outside the range, in dB; zero when inside.
    pub fn distance(&self, value: Rssi) -> i32 {
        if value < self.min {
            self.min.dbm() - value.dbm()
        } else if value > self.max {
            value.dbm() - self.max.dbm()
        } else {
            0
        }
    }

    pub fn widen(&self, value: Rssi) -> Self {
        RssiRange { min: self.min.min(value), max: self.max.max(value) }
    }
}

/// Per-signal RSSI ranges summarizing an interval or an area.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProcessedVector {
    ranges: BTreeMap<SignalId, RssiRange>,
}

impl ProcessedVector {
    pub fn new(ranges: BTreeMap<SignalId, RssiRange>) -> Self {
        ProcessedVector { ranges }
    }

    pub fn ranges(&self) -> &BTreeMap<SignalId, RssiRange> {
        &self.ranges
    }

    pub fn get(&self, id: &SignalId) -> Option<RssiRange> {
        self.ranges.get(id).copied()
    }

    pub fn contains(&self, id: &SignalId) -> bool {
        self.ranges.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &SignalId> + '_ {
        self.ranges.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SignalId, RssiRange)> + '_ {
        self.ranges.iter().map(|(id, r)| (id, *r))
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

/// A processed vector together with the window during which it is infectious.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    vector: ProcessedVector,
    start: Timestamp,
    end: Timestamp,
}

impl Segment {
    pub fn new(vector: ProcessedVector, start: Timestamp, end: Timestamp) -> Result<Self, ModelError> {
        if start >= end {
            return Err(ModelError::EmptyWindow { start, end });
        }
        Ok(Segment { vector, start, end })
    }

    pub fn vector(&self) -> &ProcessedVector {
        &self.vector
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn end(&self) -> Timestamp {
        self.end
    }

    /// Inclusive on both ends.
    pub fn is_active_at(&self, t: Timestamp) -> bool {
        self.start <= t && t <= self.end
    }
}

/// The published artifact of a confirmed case or an infected area.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProcessedProfile {
    segments: Vec<Segment>,
    case_label: String,
}

impl ProcessedProfile {
    /// Segments must be ordered by start time; windows may overlap.
    pub fn new(segments: Vec<Segment>, case_label: impl Into<String>) -> Result<Self, ModelError> {
        for (i, pair) in segments.windows(2).enumerate() {
            if pair[1].start < pair[0].start {
                return Err(ModelError::UnorderedSegments { index: i + 1 });
            }
        }
        Ok(ProcessedProfile { segments, case_label: case_label.into() })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn case_label(&self) -> &str {
        &self.case_label
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Segments whose window contains `t`, with their indices, in profile order.
    pub fn active_at(&self, t: Timestamp) -> impl Iterator<Item = (usize, &Segment)> + '_ {
        let upto = self.segments.partition_point(|s| s.start <= t);
        self.segments[..upto]
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.end >= t)
    }
}

/// Virus lifespans, in seconds, applied after each interval of a case profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LifespanSchedule {
    default: u32,
    per_segment: Option<Vec<u32>>,
}

impl LifespanSchedule {
    /// Thirty minutes.
    pub const DEFAULT_LIFESPAN: u32 = 30 * 60;

    pub fn uniform(lifespan: u32) -> Self {
        LifespanSchedule { default: lifespan, per_segment: None }
    }

    pub fn per_segment(default: u32, lifespans: Vec<u32>) -> Self {
        LifespanSchedule { default, per_segment: Some(lifespans) }
    }

    pub fn default_lifespan(&self) -> u32 {
        self.default
    }

    /// Resolves the lifespan of every interval of a profile with `vectors`
    /// scans. A per-segment list must have exactly `vectors - 1` entries.
    pub fn resolve(&self, vectors: usize) -> Result<Vec<u32>, ModelError> {
        let intervals = vectors.saturating_sub(1);
        match &self.per_segment {
            None => Ok(vec![self.default; intervals]),
            Some(list) if list.len() == intervals => Ok(list.clone()),
            Some(list) => Err(ModelError::LifespanLength { expected: intervals, actual: list.len() }),
        }
    }
}

impl Default for LifespanSchedule {
    fn default() -> Self {
        Self::uniform(Self::DEFAULT_LIFESPAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_mac_is_deterministic() {
        let a = hash_mac("AA:BB:CC:DD:EE:FF", b"salt").unwrap();
        let b = hash_mac("AA:BB:CC:DD:EE:FF", b"salt").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hash_mac_distinguishes_addresses_and_salts() {
        let a = hash_mac("AA:BB:CC:DD:EE:FF", b"salt").unwrap();
        let b = hash_mac("AA:BB:CC:DD:EE:F0", b"salt").unwrap();
        let c = hash_mac("AA:BB:CC:DD:EE:FF", b"pepper").unwrap();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn hash_mac_matches_sha256_of_salt_then_mac() {
        let id = hash_mac("AA:BB:CC:DD:EE:FF", b"s").unwrap();
        let expected = Sha256::digest(b"sAA:BB:CC:DD:EE:FF");
        assert_eq!(id.as_bytes()[..], expected[..]);
    }

    #[test]
    fn hash_mac_rejects_non_canonical() {
        for bad in [
            "aa:bb:cc:dd:ee:ff",
            "AA-BB-CC-DD-EE-FF",
            "AA:BB:CC:DD:EE",
            "AA:BB:CC:DD:EE:FF:00",
            "AABBCCDDEEFF",
            "AA:BB:CC:DD:EE:FG",
            "",
        ] {
            assert!(matches!(hash_mac(bad, b""), Err(ModelError::MalformedMac(_))), "{bad}");
        }
    }

    #[test]
    fn clamp_rssi_examples() {
        assert_eq!(clamp_rssi(-60).dbm(), -60);
        assert_eq!(clamp_rssi(-120).dbm(), -100);
        assert_eq!(clamp_rssi(5).dbm(), 0);
        assert_eq!(clamp_rssi(i32::MIN).dbm(), -100);
        assert_eq!(clamp_rssi(i32::MAX).dbm(), 0);
    }

    #[test]
    fn signal_id_hex_round_trip() {
        let id = hash_mac("01:23:45:67:89:AB", b"").unwrap();
        assert_eq!(SignalId::from_hex(&id.to_hex()).unwrap(), id);
        assert!(SignalId::from_hex(&id.to_hex().to_uppercase()).is_err());
        assert!(SignalId::from_hex("abc").is_err());
    }

    #[test]
    fn profile_rejects_non_increasing_timestamps() {
        let v = |t| SignalVector::empty(t);
        assert!(SignalProfile::new(vec![v(1), v(2), v(3)], None).is_ok());
        let err = SignalProfile::new(vec![v(1), v(2), v(2)], None).unwrap_err();
        assert!(matches!(err, ModelError::NonIncreasingTimestamps { index: 2, .. }));
    }

    #[test]
    fn duplicate_raw_reading_rejected() {
        let id = SignalId::from_bytes([1; 32]);
        assert!(SignalVector::from_raw(0, [(id, -50), (id, -60)]).is_err());
    }

    #[test]
    fn range_distance_is_piecewise() {
        let r = RssiRange::new(Rssi::new(-70).unwrap(), Rssi::new(-50).unwrap()).unwrap();
        assert_eq!(r.distance(Rssi::new(-60).unwrap()), 0);
        assert_eq!(r.distance(Rssi::new(-80).unwrap()), 10);
        assert_eq!(r.distance(Rssi::new(-40).unwrap()), 10);
        assert!(RssiRange::new(Rssi::new(-40).unwrap(), Rssi::new(-50).unwrap()).is_err());
    }

    #[test]
    fn segment_requires_positive_window() {
        assert!(Segment::new(ProcessedVector::default(), 10, 10).is_err());
        assert!(Segment::new(ProcessedVector::default(), 10, 11).is_ok());
    }

    #[test]
    fn active_at_respects_overlapping_windows() {
        let seg = |s, e| Segment::new(ProcessedVector::default(), s, e).unwrap();
        let p = ProcessedProfile::new(vec![seg(0, 100), seg(10, 20), seg(50, 60)], "c").unwrap();
        let at = |t| p.active_at(t).map(|(i, _)| i).collect::<Vec<_>>();
        assert_eq!(at(15), vec![0, 1]);
        assert_eq!(at(100), vec![0]);
        assert_eq!(at(60), vec![0, 2]);
        assert!(at(101).is_empty());
        assert!(at(-1).is_empty());
    }

    #[test]
    fn lifespan_schedule_length_checked() {
        assert_eq!(LifespanSchedule::uniform(5).resolve(4).unwrap(), vec![5, 5, 5]);
        let s = LifespanSchedule::per_segment(0, vec![1, 2]);
        assert_eq!(s.resolve(3).unwrap(), vec![1, 2]);
        assert!(matches!(s.resolve(4), Err(ModelError::LifespanLength { expected: 3, actual: 2 })));
    }
}
