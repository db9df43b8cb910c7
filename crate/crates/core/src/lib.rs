//! Decentralized WiFi-scan contact detection.
//!
//! A confirmed case's scans (or a survey walk of an infected area) become a
//! [`ProcessedProfile`]: per-signal RSSI ranges with lifespan-extended
//! validity windows. Users download published profiles and match their own
//! scans locally with [`detect_contacts`], then aggregate per-scan flags into
//! close-contact episodes.

pub mod codec;
pub mod detection;
pub mod error;
pub mod model;
pub mod processing;
pub mod report;
pub mod similarity;

pub use codec::{
    parse_processed_profile, parse_profile, parse_signal_profile, serialize_processed_profile, serialize_signal_profile,
    ParseError, Profile,
};
pub use detection::{aggregate_episodes, best_match, detect_contacts, match_and_notify, ContactFlag, DetectionConfig};
pub use error::{ConfigError, MetricError, ModelError, ProcessingError};
pub use model::{
    clamp_rssi, hash_mac, LifespanSchedule, ProcessedProfile, ProcessedVector, Rssi, RssiRange, Segment,
    SignalId, SignalProfile, SignalVector, Timestamp, WEAK_SIGNAL_FLOOR,
};
pub use processing::{build_area_profile, build_case_profile, build_case_profile_with, build_processed_vector, CaseProfileOptions};
pub use report::{ContactReport, Episode, ReportSummary};
pub use similarity::{aed, aed_with, amd, amd_with, jaccard, overlap_ratio, rssi_difference, vcontact_similarity, BaselineDenominator};
