//! Per-timestamp contact detection against published processed profiles,
//! and aggregation of contact flags into close-contact episodes.

use crate::error::ConfigError;
use crate::model::{ProcessedProfile, SignalProfile, SignalVector, Timestamp};
use crate::report::{ContactReport, Episode};
use crate::similarity::vcontact_similarity;

/// Detection threshold and close-contact rule.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionConfig {
    alpha: f64,
    window_length: i64,
    min_exposure: i64,
    sampling_period: i64,
}

impl DetectionConfig {
    pub const DEFAULT_WINDOW: i64 = 600;
    pub const DEFAULT_MIN_EXPOSURE: i64 = 300;
    pub const DEFAULT_SAMPLING_PERIOD: i64 = 60;

    /// Ten-minute window, five minutes of exposure, one-minute sampling.
    pub fn new(alpha: f64) -> Result<Self, ConfigError> {
        Self::with_window(alpha, Self::DEFAULT_WINDOW, Self::DEFAULT_MIN_EXPOSURE, Self::DEFAULT_SAMPLING_PERIOD)
    }

    pub fn with_window(
        alpha: f64,
        window_length: i64,
        min_exposure: i64,
        sampling_period: i64,
    ) -> Result<Self, ConfigError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(ConfigError::Alpha(alpha));
        }
        for (field, value) in [
            ("window_length", window_length),
            ("min_exposure", min_exposure),
            ("sampling_period", sampling_period),
        ] {
            if value <= 0 {
                return Err(ConfigError::NonPositive { field, value });
            }
        }
        if min_exposure > window_length {
            return Err(ConfigError::ExposureExceedsWindow { min_exposure, window: window_length });
        }
        Ok(DetectionConfig { alpha, window_length, min_exposure, sampling_period })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn window_length(&self) -> i64 {
        self.window_length
    }

    pub fn min_exposure(&self) -> i64 {
        self.min_exposure
    }

    pub fn sampling_period(&self) -> i64 {
        self.sampling_period
    }

    /// True flags a window must hold to count as close contact.
    pub fn min_true_flags(&self) -> usize {
        ((self.min_exposure + self.sampling_period - 1) / self.sampling_period) as usize
    }
}

/// Detection outcome for one user scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactFlag {
    pub timestamp: Timestamp,
    pub in_contact: bool,
    /// Score of the matching segment when in contact, otherwise the best
    /// score over all active segments (0 if none was active).
    pub best_score: f64,
    pub matched_segment: Option<usize>,
    pub matched_case: Option<String>,
}

/// Best similarity of `scan` against any segment active at its timestamp,
/// with the `(profile, segment)` index that achieved it.
pub fn best_match(scan: &SignalVector, published: &[ProcessedProfile]) -> Option<(f64, usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for (pi, profile) in published.iter().enumerate() {
        for (si, seg) in profile.active_at(scan.timestamp()) {
            let score = vcontact_similarity(scan, seg.vector());
            if best.is_none_or(|(b, _, _)| score > b) {
                best = Some((score, pi, si));
            }
        }
    }
    best
}

fn detect_one(scan: &SignalVector, published: &[ProcessedProfile], alpha: f64) -> ContactFlag {
    let t = scan.timestamp();
    let mut best = 0.0f64;
    for profile in published {
        for (si, seg) in profile.active_at(t) {
            let score = vcontact_similarity(scan, seg.vector());
            if score >= alpha {
                return ContactFlag {
                    timestamp: t,
                    in_contact: true,
                    best_score: score,
                    matched_segment: Some(si),
                    matched_case: Some(profile.case_label().to_string()),
                };
            }
            best = best.max(score);
        }
    }
    ContactFlag { timestamp: t, in_contact: false, best_score: best, matched_segment: None, matched_case: None }
}

/// Flags each user scan. Published profiles are scanned in order and, within
/// a profile, segments in order; the first active segment reaching `alpha`
/// decides the flag.
pub fn detect_contacts(user: &SignalProfile, published: &[ProcessedProfile], cfg: &DetectionConfig) -> Vec<ContactFlag> {
    user.vectors().iter().map(|scan| detect_one(scan, published, cfg.alpha)).collect()
}

/// Groups true flags into close-contact episodes.
///
/// A window `[s, s + window_length)` qualifies when its true flags times the
/// sampling period reach the minimum exposure. Every true flag inside some
/// qualifying window is exposed; qualifying windows sharing an exposed flag
/// merge into one episode.
pub fn aggregate_episodes(flags: &[ContactFlag], cfg: &DetectionConfig) -> ContactReport {
    let need = cfg.min_true_flags();
    let mut prefix = Vec::with_capacity(flags.len() + 1);
    prefix.push(0usize);
    for f in flags {
        prefix.push(prefix.last().unwrap() + usize::from(f.in_contact));
    }

    // Windows starting at a true flag cover every qualifying true-flag set.
    // Track the merged [first, last] true-flag index span of the open episode.
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut end = 0usize;
    for start in 0..flags.len() {
        if !flags[start].in_contact {
            continue;
        }
        let limit = flags[start].timestamp.saturating_add(cfg.window_length);
        end = end.max(start);
        while end < flags.len() && flags[end].timestamp < limit {
            end += 1;
        }
        if prefix[end] - prefix[start] < need {
            continue;
        }
        let last_true = (start..end).rev().find(|&i| flags[i].in_contact).unwrap();
        match spans.last_mut() {
            Some((_, open_last)) if start <= *open_last => *open_last = (*open_last).max(last_true),
            _ => spans.push((start, last_true)),
        }
    }

    let episodes = spans
        .into_iter()
        .map(|(first, last)| {
            let members: Vec<&ContactFlag> = flags[first..=last].iter().filter(|f| f.in_contact).collect();
            Episode {
                start: flags[first].timestamp,
                end: flags[last].timestamp,
                case_label: dominant_case(&members),
                contact_flags: members.len(),
                contact_minutes: (members.len() as i64 * cfg.sampling_period) as f64 / 60.0,
            }
        })
        .collect();
    ContactReport { flags: flags.to_vec(), episodes }
}

// Most frequent matched case; ties go to the case matched first.
fn dominant_case(members: &[&ContactFlag]) -> Option<String> {
    let mut counts: Vec<(&str, usize)> = Vec::new();
    for label in members.iter().filter_map(|f| f.matched_case.as_deref()) {
        match counts.iter_mut().find(|(l, _)| *l == label) {
            Some((_, n)) => *n += 1,
            None => counts.push((label, 1)),
        }
    }
    let max = counts.iter().map(|(_, n)| *n).max()?;
    counts.into_iter().find(|(_, n)| *n == max).map(|(l, _)| l.to_string())
}

/// Detection followed by episode aggregation.
pub fn match_and_notify(user: &SignalProfile, published: &[ProcessedProfile], cfg: &DetectionConfig) -> ContactReport {
    aggregate_episodes(&detect_contacts(user, published, cfg), cfg)
}
