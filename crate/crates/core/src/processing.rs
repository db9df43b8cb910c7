//! Turns discrete scans into continuous, lifespan-annotated processed
//! profiles: one segment per consecutive scan pair for a case carrying the
//! app, or a single aggregated segment for a surveyed area.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::error::ProcessingError;
use crate::model::{
    LifespanSchedule, ProcessedProfile, ProcessedVector, Rssi, RssiRange, Segment, SignalProfile,
    SignalVector, Timestamp,
};

/// Summarizes two consecutive scans. Signals seen in both get the span of
/// their two readings; a signal seen in only one scan ranges from the
/// weak-signal floor up to its single reading.
pub fn build_processed_vector(a: &SignalVector, b: &SignalVector) -> ProcessedVector {
    let mut ranges = BTreeMap::new();
    for (id, rssi) in a.iter() {
        let range = match b.get(id) {
            Some(other) => RssiRange::spanning(rssi, other),
            None => RssiRange::spanning(Rssi::FLOOR, rssi),
        };
        ranges.insert(*id, range);
    }
    for (id, rssi) in b.iter() {
        ranges.entry(*id).or_insert_with(|| RssiRange::spanning(Rssi::FLOOR, rssi));
    }
    ProcessedVector::new(ranges)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseProfileOptions {
    /// Scan pairs further apart than this many seconds produce no segment.
    /// `None` disables the check.
    pub max_gap: Option<i64>,
}

impl CaseProfileOptions {
    pub const DEFAULT_MAX_GAP: i64 = 600;
}

impl Default for CaseProfileOptions {
    fn default() -> Self {
        CaseProfileOptions { max_gap: Some(Self::DEFAULT_MAX_GAP) }
    }
}

/// Builds the processed profile of a confirmed case from their own scans,
/// using the default [`CaseProfileOptions`].
pub fn build_case_profile(
    scans: &SignalProfile,
    lifespans: &LifespanSchedule,
    label: impl Into<String>,
) -> Result<ProcessedProfile, ProcessingError> {
    build_case_profile_with(scans, lifespans, label, &CaseProfileOptions::default())
}

/// Segment `i` covers `[t_i, t_{i+1} + lifespan_i]` with the vector built
/// from scans `i` and `i + 1`.
pub fn build_case_profile_with(
    scans: &SignalProfile,
    lifespans: &LifespanSchedule,
    label: impl Into<String>,
    options: &CaseProfileOptions,
) -> Result<ProcessedProfile, ProcessingError> {
    let vectors = scans.vectors();
    if vectors.len() < 2 {
        return Err(ProcessingError::InsufficientData { needed: 2, got: vectors.len() });
    }
    let lifespans = lifespans.resolve(vectors.len())?;
    let mut segments = Vec::with_capacity(vectors.len() - 1);
    for (pair, lifespan) in vectors.windows(2).zip(lifespans) {
        let (a, b) = (&pair[0], &pair[1]);
        let gap = b.timestamp() - a.timestamp();
        if options.max_gap.is_some_and(|max| gap > max) {
            log::debug!("skipping scan pair at t={} with {gap}s gap", a.timestamp());
            continue;
        }
        let end = b.timestamp() + Timestamp::from(lifespan);
        segments.push(Segment::new(build_processed_vector(a, b), a.timestamp(), end)?);
    }
    Ok(ProcessedProfile::new(segments, label)?)
}

/// Builds the single-segment profile of an infected area from a survey walk.
/// Each signal's range is the min and max of its own observations; the
/// window runs from the case's arrival to `lifespan` seconds after departure.
pub fn build_area_profile(
    survey: &SignalProfile,
    stay_start: Timestamp,
    stay_end: Timestamp,
    lifespan: u32,
    label: impl Into<String>,
) -> Result<ProcessedProfile, ProcessingError> {
    if survey.is_empty() {
        return Err(ProcessingError::InsufficientData { needed: 1, got: 0 });
    }
    if stay_start >= stay_end {
        return Err(ProcessingError::EmptyStay { start: stay_start, end: stay_end });
    }
    let mut ranges: BTreeMap<_, RssiRange> = BTreeMap::new();
    for v in survey.vectors() {
        for (id, rssi) in v.iter() {
            match ranges.entry(*id) {
                Entry::Vacant(e) => {
                    e.insert(RssiRange::point(rssi));
                }
                Entry::Occupied(mut e) => {
                    let widened = e.get().widen(rssi);
                    e.insert(widened);
                }
            }
        }
    }
    let segment = Segment::new(
        ProcessedVector::new(ranges),
        stay_start,
        stay_end + Timestamp::from(lifespan),
    )?;
    Ok(ProcessedProfile::new(vec![segment], label)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SignalId;

    fn id(n: u8) -> SignalId {
        SignalId::from_bytes([n; 32])
    }

    fn v(t: Timestamp, readings: &[(u8, i32)]) -> SignalVector {
        SignalVector::from_raw(t, readings.iter().map(|&(n, r)| (id(n), r))).unwrap()
    }

    fn range(lo: i32, hi: i32) -> RssiRange {
        RssiRange::new(Rssi::new(lo).unwrap(), Rssi::new(hi).unwrap()).unwrap()
    }

    #[test]
    fn processed_vector_mixed_membership() {
        let (x, y, z) = (1, 2, 3);
        let a = v(0, &[(x, -50), (y, -60)]);
        let b = v(1, &[(x, -55), (z, -70)]);
        let p = build_processed_vector(&a, &b);
        assert_eq!(p.len(), 3);
        assert_eq!(p.get(&id(x)), Some(range(-55, -50)));
        assert_eq!(p.get(&id(y)), Some(range(-100, -60)));
        assert_eq!(p.get(&id(z)), Some(range(-100, -70)));
    }

    #[test]
    fn processed_vector_identical_inputs_collapse() {
        let a = v(0, &[(1, -40)]);
        assert_eq!(build_processed_vector(&a, &a).get(&id(1)), Some(range(-40, -40)));
    }

    #[test]
    fn processed_vector_one_sided() {
        let p = build_processed_vector(&v(0, &[]), &v(1, &[(1, -70)]));
        assert_eq!(p.get(&id(1)), Some(range(-100, -70)));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn case_profile_single_interval() {
        let w = SignalProfile::new(vec![v(0, &[(1, -40)]), v(60, &[(1, -42)])], None).unwrap();
        let p = build_case_profile(&w, &LifespanSchedule::uniform(1800), "c").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!((p.segments()[0].start(), p.segments()[0].end()), (0, 1860));
    }

    #[test]
    fn case_profile_four_scans_three_segments() {
        let w = SignalProfile::new(
            vec![v(0, &[(1, -40)]), v(60, &[(2, -50)]), v(120, &[(1, -45)]), v(180, &[(3, -60)])],
            None,
        )
        .unwrap();
        let sched = LifespanSchedule::per_segment(0, vec![100, 200, 300]);
        let p = build_case_profile(&w, &sched, "c").unwrap();
        let windows: Vec<_> = p.segments().iter().map(|s| (s.start(), s.end())).collect();
        assert_eq!(windows, vec![(0, 160), (60, 320), (120, 480)]);
    }

    #[test]
    fn zero_lifespan_windows_touch_at_endpoints() {
        let w = SignalProfile::new(vec![v(0, &[]), v(10, &[]), v(25, &[])], None).unwrap();
        let p = build_case_profile(&w, &LifespanSchedule::uniform(0), "c").unwrap();
        let windows: Vec<_> = p.segments().iter().map(|s| (s.start(), s.end())).collect();
        assert_eq!(windows, vec![(0, 10), (10, 25)]);
    }

    #[test]
    fn case_profile_needs_two_scans() {
        let w = SignalProfile::new(vec![v(0, &[])], None).unwrap();
        assert_eq!(
            build_case_profile(&w, &LifespanSchedule::default(), "c"),
            Err(ProcessingError::InsufficientData { needed: 2, got: 1 })
        );
    }

    #[test]
    fn wrong_lifespan_list_length_rejected() {
        let w = SignalProfile::new(vec![v(0, &[]), v(10, &[])], None).unwrap();
        let sched = LifespanSchedule::per_segment(0, vec![1, 2]);
        assert!(matches!(build_case_profile(&w, &sched, "c"), Err(ProcessingError::Model(_))));
    }

    #[test]
    fn long_gaps_are_skipped() {
        let w = SignalProfile::new(vec![v(0, &[]), v(60, &[]), v(2000, &[]), v(2060, &[])], None).unwrap();
        let p = build_case_profile(&w, &LifespanSchedule::uniform(0), "c").unwrap();
        let starts: Vec<_> = p.segments().iter().map(|s| s.start()).collect();
        assert_eq!(starts, vec![0, 2000]);
        let all = CaseProfileOptions { max_gap: None };
        assert_eq!(build_case_profile_with(&w, &LifespanSchedule::uniform(0), "c", &all).unwrap().len(), 3);
    }

    #[test]
    fn area_profile_aggregates_min_max() {
        let w = SignalProfile::new(
            vec![v(1, &[(1, -50)]), v(2, &[(2, -80)]), v(3, &[(1, -62)]), v(4, &[])],
            None,
        )
        .unwrap();
        let p = build_area_profile(&w, 0, 10, 0, "area").unwrap();
        let seg = &p.segments()[0];
        assert_eq!(seg.vector().get(&id(1)), Some(range(-62, -50)));
        // observed once: no floor padding
        assert_eq!(seg.vector().get(&id(2)), Some(range(-80, -80)));
    }

    #[test]
    fn area_profile_window_extends_past_departure() {
        let w = SignalProfile::new(vec![v(5, &[(1, -40)])], None).unwrap();
        let p = build_area_profile(&w, 100, 400, 1800, "a").unwrap();
        let seg = &p.segments()[0];
        assert_eq!((seg.start(), seg.end()), (100, 2200));
        assert_eq!(seg.vector().get(&id(1)), Some(range(-40, -40)));
    }

    #[test]
    fn area_profile_errors() {
        assert_eq!(
            build_area_profile(&SignalProfile::default(), 0, 10, 0, "a"),
            Err(ProcessingError::InsufficientData { needed: 1, got: 0 })
        );
        let w = SignalProfile::new(vec![v(5, &[])], None).unwrap();
        assert!(matches!(build_area_profile(&w, 10, 10, 0, "a"), Err(ProcessingError::EmptyStay { .. })));
    }
}
