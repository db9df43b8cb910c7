use thiserror::Error;

use crate::model::Timestamp;

/// Invariant violations raised when constructing core types.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed MAC address {0:?}: expected uppercase AA:BB:CC:DD:EE:FF")]
    MalformedMac(String),
    #[error("invalid signal id {0:?}: expected 64 lowercase hex digits")]
    InvalidSignalId(String),
    #[error("rssi {0} dBm outside [-100, 0]")]
    RssiOutOfRange(i32),
    #[error("signal {0} appears more than once in a vector")]
    DuplicateSignal(String),
    #[error("timestamp at index {index} ({current}) does not follow {previous}")]
    NonIncreasingTimestamps { index: usize, previous: Timestamp, current: Timestamp },
    #[error("rssi range min {min} exceeds max {max}")]
    InvertedRange { min: i32, max: i32 },
    #[error("segment window [{start}, {end}] is empty")]
    EmptyWindow { start: Timestamp, end: Timestamp },
    #[error("segment {index} starts before its predecessor")]
    UnorderedSegments { index: usize },
    #[error("lifespan list has {actual} entries, profile has {expected} intervals")]
    LifespanLength { expected: usize, actual: usize },
}

/// Failures of the profile builders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcessingError {
    #[error("need at least {needed} signal vectors, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("stay window [{start}, {end}] is empty")]
    EmptyStay { start: Timestamp, end: Timestamp },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("both signal vectors are empty")]
    BothEmpty,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("alpha {0} outside (0, 1]")]
    Alpha(f64),
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: i64 },
    #[error("minimum exposure {min_exposure}s exceeds window {window}s")]
    ExposureExceedsWindow { min_exposure: i64, window: i64 },
}
