//! Straight-line reference implementations and random generators shared by
//! the property and acceptance tests. Nothing here calls into the
//! production algorithms; inputs are read through plain accessors only.

use std::collections::{BTreeMap, BTreeSet};

use proptest::collection::{btree_map, vec};
use proptest::prelude::*;
use vcontact_core::{ProcessedProfile, ProcessedVector, Rssi, RssiRange, Segment, SignalId, SignalProfile, SignalVector};

pub type Readings = BTreeMap<u8, i32>;
pub type Ranges = BTreeMap<u8, (i32, i32)>;

pub fn sid(n: u8) -> SignalId {
    let mut bytes = [0u8; 32];
    bytes[0] = n;
    SignalId::from_bytes(bytes)
}

fn index_of(id: &SignalId) -> u8 {
    id.as_bytes()[0]
}

pub fn readings_of(v: &SignalVector) -> Readings {
    v.iter().map(|(id, r)| (index_of(id), r.dbm())).collect()
}

pub fn ranges_of(p: &ProcessedVector) -> Ranges {
    p.iter().map(|(id, r)| (index_of(id), (r.min().dbm(), r.max().dbm()))).collect()
}

pub fn to_vector(t: i64, readings: &Readings) -> SignalVector {
    SignalVector::from_raw(t, readings.iter().map(|(&n, &r)| (sid(n), r))).unwrap()
}

pub fn to_processed(ranges: &Ranges) -> ProcessedVector {
    ProcessedVector::new(
        ranges
            .iter()
            .map(|(&n, &(lo, hi))| (sid(n), RssiRange::new(Rssi::new(lo).unwrap(), Rssi::new(hi).unwrap()).unwrap()))
            .collect(),
    )
}

// ---------------------------------------------------------------- processing

/// Case-by-case evaluation over the ID union.
pub fn processed_vector_oracle(a: &Readings, b: &Readings) -> Ranges {
    let union: BTreeSet<u8> = a.keys().chain(b.keys()).copied().collect();
    union
        .into_iter()
        .map(|id| {
            let range = match (a.get(&id), b.get(&id)) {
                (Some(&x), Some(&y)) => (if x < y { x } else { y }, if x > y { x } else { y }),
                (Some(&x), None) => (-100, x),
                (None, Some(&y)) => (-100, y),
                (None, None) => unreachable!(),
            };
            (id, range)
        })
        .collect()
}

/// `(start, end, ranges)` per segment, no gap filtering.
pub fn case_profile_oracle(scans: &[(i64, Readings)], lifespans: &[u32]) -> Vec<(i64, i64, Ranges)> {
    let mut out = Vec::new();
    for i in 0..scans.len().saturating_sub(1) {
        let (t0, a) = &scans[i];
        let (t1, b) = &scans[i + 1];
        out.push((*t0, *t1 + i64::from(lifespans[i]), processed_vector_oracle(a, b)));
    }
    out
}

/// Min and max of every observation of every ID.
pub fn area_profile_oracle(scans: &[(i64, Readings)]) -> Ranges {
    let mut observed: BTreeMap<u8, Vec<i32>> = BTreeMap::new();
    for (_, r) in scans {
        for (&id, &rssi) in r {
            observed.entry(id).or_default().push(rssi);
        }
    }
    observed
        .into_iter()
        .map(|(id, xs)| (id, (*xs.iter().min().unwrap(), *xs.iter().max().unwrap())))
        .collect()
}

// ---------------------------------------------------------------- similarity

/// Exact rational similarity `(numerator, denominator)`.
///
/// With `k` shared IDs, `m = min(|A|, |Â|)` and `S` the summed out-of-range
/// distance: `P = (k / m) / (S / k + 1) = k² / (m (S + k))`.
pub fn similarity_rational(a: &Readings, p: &Ranges) -> (i128, i128) {
    let mut shared = 0i128;
    let mut total = 0i128;
    for (id, &s) in a {
        if let Some(&(lo, hi)) = p.get(id) {
            shared += 1;
            total += if s < lo {
                i128::from(lo - s)
            } else if s > hi {
                i128::from(s - hi)
            } else {
                0
            };
        }
    }
    if shared == 0 {
        return (0, 1);
    }
    let m = a.len().min(p.len()) as i128;
    (shared * shared, m * (total + shared))
}

pub fn similarity_oracle(a: &Readings, p: &Ranges) -> f64 {
    let (n, d) = similarity_rational(a, p);
    n as f64 / d as f64
}

// ---------------------------------------------------------------- detection

/// Every `(scan, segment)` pair is scored; a scan is in contact if any
/// active segment of any profile reaches `alpha`.
pub fn detect_oracle(user: &SignalProfile, published: &[ProcessedProfile], alpha: f64) -> Vec<bool> {
    user.vectors()
        .iter()
        .map(|scan| {
            let a = readings_of(scan);
            let mut hit = false;
            for profile in published {
                for seg in profile.segments() {
                    let t = scan.timestamp();
                    if seg.start() <= t && t <= seg.end() && similarity_oracle(&a, &ranges_of(seg.vector())) >= alpha {
                        hit = true;
                    }
                }
            }
            hit
        })
        .collect()
}

/// Exhaustive window placement. Returns `(first, last, true_count)` per
/// episode, as flag indices.
pub fn episodes_oracle(flags: &[(i64, bool)], window: i64, min_true: usize) -> Vec<(usize, usize, usize)> {
    let n = flags.len();
    // Coverage of [s, s + window) only changes at s = t or s = t - window + 1.
    let mut starts: BTreeSet<i64> = BTreeSet::new();
    for &(t, _) in flags {
        starts.insert(t);
        starts.insert(t - window + 1);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    let mut exposed = vec![false; n];
    for s in starts {
        let members: Vec<usize> =
            (0..n).filter(|&i| flags[i].1 && flags[i].0 >= s && flags[i].0 < s + window).collect();
        if members.len() >= min_true {
            for &m in &members {
                exposed[m] = true;
                let (ra, rb) = (find(&mut parent, members[0]), find(&mut parent, m));
                parent[rb] = ra;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in (0..n).filter(|&i| exposed[i]) {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<_> = groups.into_values().map(|g| (g[0], *g.last().unwrap(), g.len())).collect();
    out.sort();
    out
}

// ---------------------------------------------------------------- generators

pub fn arb_rssi() -> impl Strategy<Value = i32> {
    -100i32..=0
}

/// Readings over a small ID universe so that overlaps are common.
pub fn arb_readings(universe: u8, max_len: usize) -> impl Strategy<Value = Readings> {
    btree_map(0..universe, arb_rssi(), 0..=max_len)
}

pub fn arb_ranges(universe: u8, max_len: usize) -> impl Strategy<Value = Ranges> {
    btree_map(0..universe, (arb_rssi(), arb_rssi()).prop_map(|(a, b)| (a.min(b), a.max(b))), 0..=max_len)
}

/// Scans at strictly increasing times with gaps of 1..=`max_gap` seconds.
pub fn arb_scans(universe: u8, max_ids: usize, max_scans: usize, max_gap: i64) -> impl Strategy<Value = Vec<(i64, Readings)>> {
    (0i64..1000, vec((1..=max_gap, arb_readings(universe, max_ids)), 0..=max_scans)).prop_map(|(t0, steps)| {
        let mut t = t0;
        steps
            .into_iter()
            .map(|(gap, r)| {
                t += gap;
                (t, r)
            })
            .collect()
    })
}

pub fn to_profile(scans: &[(i64, Readings)]) -> SignalProfile {
    SignalProfile::new(scans.iter().map(|(t, r)| to_vector(*t, r)).collect(), None).unwrap()
}

/// A published profile with random windows and ranges.
pub fn arb_published(universe: u8, max_segments: usize, label: &'static str) -> impl Strategy<Value = ProcessedProfile> {
    vec((0i64..3000, 1i64..2000, arb_ranges(universe, 12)), 0..=max_segments).prop_map(move |mut segs| {
        segs.sort_by_key(|s| s.0);
        let segments = segs
            .into_iter()
            .map(|(start, len, ranges)| Segment::new(to_processed(&ranges), start, start + len).unwrap())
            .collect();
        ProcessedProfile::new(segments, label).unwrap()
    })
}

/// Precision and recall at each threshold by direct counting, flagging
/// scores `>= t`. Empty-set conventions as in the harness.
pub fn sweep_oracle(scores: &[f64], labels: &[bool], grid: &[f64]) -> Vec<(f64, f64)> {
    grid.iter()
        .map(|&t| {
            let mut tp = 0usize;
            let mut fp = 0usize;
            let mut positives = 0usize;
            for i in 0..scores.len() {
                if labels[i] {
                    positives += 1;
                }
                if scores[i] >= t {
                    if labels[i] {
                        tp += 1;
                    } else {
                        fp += 1;
                    }
                }
            }
            let precision = if tp + fp == 0 {
                if positives == 0 { 1.0 } else { 0.0 }
            } else {
                tp as f64 / (tp + fp) as f64
            };
            let recall = if positives == 0 { 1.0 } else { tp as f64 / positives as f64 };
            (precision, recall)
        })
        .collect()
}
