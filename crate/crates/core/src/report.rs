//! Contact reports and their line-oriented text form.

use std::fmt::Write as _;

use serde::Serialize;

use crate::detection::ContactFlag;
use crate::model::Timestamp;

/// A run of close contact satisfying the sliding-window rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    /// First exposed true flag.
    pub start: Timestamp,
    /// Last exposed true flag.
    pub end: Timestamp,
    pub case_label: Option<String>,
    pub contact_flags: usize,
    pub contact_minutes: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ContactReport {
    pub flags: Vec<ContactFlag>,
    pub episodes: Vec<Episode>,
}

/// Machine-readable totals, printed by the CLI as one JSON line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportSummary {
    pub flags: usize,
    pub contact_flags: usize,
    pub episodes: usize,
    pub exposure_minutes: f64,
}

fn label_or_dash(label: Option<&str>) -> String {
    match label {
        Some(l) if !l.is_empty() => percent_encoding::utf8_percent_encode(l, percent_encoding::NON_ALPHANUMERIC).to_string(),
        _ => "-".to_string(),
    }
}

impl ContactReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            flags: self.flags.len(),
            contact_flags: self.flags.iter().filter(|f| f.in_contact).count(),
            episodes: self.episodes.len(),
            exposure_minutes: self.episodes.iter().map(|e| e.contact_minutes).sum(),
        }
    }

    /// One `flag` line per scan followed by one `episode` line per episode.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.flags {
            let segment = f.matched_segment.map_or_else(|| "-".to_string(), |s| s.to_string());
            let _ = writeln!(
                out,
                "flag t={} contact={} score={:.6} segment={} case={}",
                f.timestamp,
                u8::from(f.in_contact),
                f.best_score,
                segment,
                label_or_dash(f.matched_case.as_deref()),
            );
        }
        for e in &self.episodes {
            let _ = writeln!(
                out,
                "episode start={} end={} case={} flags={} minutes={}",
                e.start,
                e.end,
                label_or_dash(e.case_label.as_deref()),
                e.contact_flags,
                e.contact_minutes,
            );
        }
        out
    }
}
