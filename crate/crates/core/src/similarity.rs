//! Similarity between a user's scan and a processed vector, plus the
//! scan-to-scan baselines used for comparison.
//!
//! The vContact score is `P = O / (D + 1)` where `O` is the ID overlap ratio
//! over the smaller ID set and `D` the mean out-of-range RSSI distance of
//! the shared IDs. `P` lies in `[0, 1]`; larger means closer.

use crate::error::MetricError;
use crate::model::{ProcessedVector, Rssi, SignalVector, WEAK_SIGNAL_FLOOR};

fn shared_count(a: &SignalVector, p: &ProcessedVector) -> usize {
    a.ids().filter(|id| p.contains(id)).count()
}

/// `|A ∩ Â| / min(|A|, |Â|)`, or 0 when either side is empty.
pub fn overlap_ratio(a: &SignalVector, p: &ProcessedVector) -> f64 {
    let smaller = a.len().min(p.len());
    if smaller == 0 {
        return 0.0;
    }
    shared_count(a, p) as f64 / smaller as f64
}

/// Mean distance, in dB, by which the user's readings of shared IDs fall
/// outside the processed ranges. `None` when no ID is shared.
pub fn rssi_difference(a: &SignalVector, p: &ProcessedVector) -> Option<f64> {
    let (total, shared) = a
        .iter()
        .filter_map(|(id, rssi)| p.get(id).map(|range| range.distance(rssi)))
        .fold((0i64, 0usize), |(sum, n), d| (sum + i64::from(d), n + 1));
    (shared > 0).then(|| total as f64 / shared as f64)
}

/// The vContact similarity `P(A, Â)`. Disjoint ID sets score 0.
pub fn vcontact_similarity(a: &SignalVector, p: &ProcessedVector) -> f64 {
    match rssi_difference(a, p) {
        Some(d) => overlap_ratio(a, p) / (d + 1.0),
        None => 0.0,
    }
}

/// `|A ∩ B| / |A ∪ B|`; 0 when both are empty.
pub fn jaccard(a: &SignalVector, b: &SignalVector) -> f64 {
    let shared = a.ids().filter(|id| b.contains(id)).count();
    let union = a.len() + b.len() - shared;
    if union == 0 {
        0.0
    } else {
        shared as f64 / union as f64
    }
}

/// Denominator used by the AMD/AED baselines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BaselineDenominator {
    /// Size of the ID union. After floor filling every ID is present on both
    /// sides, so this is the number of compared readings.
    #[default]
    Union,
    /// Number of IDs scanned by both devices before filling. Infinite
    /// distance when nothing is shared.
    Shared,
}

// Per-ID absolute differences after filling IDs missing on either side with
// the weak-signal floor.
fn filled_differences<'a>(a: &'a SignalVector, b: &'a SignalVector) -> impl Iterator<Item = i32> + 'a {
    let fill = |r: Option<Rssi>| r.map_or(WEAK_SIGNAL_FLOOR, Rssi::dbm);
    let from_a = a.iter().map(move |(id, r)| (r.dbm() - fill(b.get(id))).abs());
    let only_b = b.iter().filter(move |(id, _)| !a.contains(id)).map(move |(_, r)| (r.dbm() - WEAK_SIGNAL_FLOOR).abs());
    from_a.chain(only_b)
}

fn baseline_denominator(a: &SignalVector, b: &SignalVector, mode: BaselineDenominator) -> Result<usize, MetricError> {
    if a.is_empty() && b.is_empty() {
        return Err(MetricError::BothEmpty);
    }
    let shared = a.ids().filter(|id| b.contains(id)).count();
    Ok(match mode {
        BaselineDenominator::Union => a.len() + b.len() - shared,
        BaselineDenominator::Shared => shared,
    })
}

/// Average Manhattan distance with union denominator.
pub fn amd(a: &SignalVector, b: &SignalVector) -> Result<f64, MetricError> {
    amd_with(a, b, BaselineDenominator::Union)
}

/// Average Euclidean distance with union denominator.
pub fn aed(a: &SignalVector, b: &SignalVector) -> Result<f64, MetricError> {
    aed_with(a, b, BaselineDenominator::Union)
}

pub fn amd_with(a: &SignalVector, b: &SignalVector, mode: BaselineDenominator) -> Result<f64, MetricError> {
    let n = baseline_denominator(a, b, mode)?;
    let sum: i64 = filled_differences(a, b).map(i64::from).sum();
    Ok(if n == 0 { f64::INFINITY } else { sum as f64 / n as f64 })
}

pub fn aed_with(a: &SignalVector, b: &SignalVector, mode: BaselineDenominator) -> Result<f64, MetricError> {
    let n = baseline_denominator(a, b, mode)?;
    let sum: i64 = filled_differences(a, b).map(|d| i64::from(d) * i64::from(d)).sum();
    Ok(if n == 0 { f64::INFINITY } else { (sum as f64).sqrt() / n as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RssiRange, SignalId};
    use crate::processing::build_processed_vector;
    use std::collections::BTreeMap;

    fn id(n: u8) -> SignalId {
        SignalId::from_bytes([n; 32])
    }

    fn v(readings: &[(u8, i32)]) -> SignalVector {
        SignalVector::from_raw(0, readings.iter().map(|&(n, r)| (id(n), r))).unwrap()
    }

    fn pv(ranges: &[(u8, i32, i32)]) -> ProcessedVector {
        ProcessedVector::new(
            ranges
                .iter()
                .map(|&(n, lo, hi)| (id(n), RssiRange::new(Rssi::new(lo).unwrap(), Rssi::new(hi).unwrap()).unwrap()))
                .collect::<BTreeMap<_, _>>(),
        )
    }

    #[test]
    fn overlap_ratio_examples() {
        // a = {x, y, z}, p = {x, y, u, v}
        let a = v(&[(1, -50), (2, -50), (3, -50)]);
        let p = pv(&[(1, -60, -40), (2, -60, -40), (4, -60, -40), (5, -60, -40)]);
        assert_eq!(overlap_ratio(&a, &p), 2.0 / 3.0);
        assert_eq!(overlap_ratio(&a, &pv(&[(1, -1, -1), (2, -1, -1), (3, -1, -1)])), 1.0);
        assert_eq!(overlap_ratio(&a, &pv(&[(9, -1, -1)])), 0.0);
        assert_eq!(overlap_ratio(&v(&[]), &p), 0.0);
        assert_eq!(overlap_ratio(&a, &pv(&[])), 0.0);
    }

    #[test]
    fn rssi_difference_examples() {
        let p = pv(&[(1, -70, -50)]);
        assert_eq!(rssi_difference(&v(&[(1, -60)]), &p), Some(0.0));
        assert_eq!(rssi_difference(&v(&[(1, -80)]), &p), Some(10.0));
        assert_eq!(rssi_difference(&v(&[(1, -40)]), &p), Some(10.0));
        assert_eq!(rssi_difference(&v(&[(2, -40)]), &p), None);
        // x inside (d = 0), y six below its floor (d = 6)
        let p2 = pv(&[(1, -70, -50), (2, -60, -55)]);
        assert_eq!(rssi_difference(&v(&[(1, -60), (2, -66)]), &p2), Some(3.0));
    }

    #[test]
    fn vcontact_examples() {
        let a = v(&[(1, -40), (2, -55)]);
        let exact = build_processed_vector(&a, &a);
        assert_eq!(vcontact_similarity(&a, &exact), 1.0);
        assert_eq!(vcontact_similarity(&a, &pv(&[(7, -50, -40)])), 0.0);

        // O = 2/3 and D = 3 gives 1/6.
        let a = v(&[(1, -60), (2, -66), (3, -50)]);
        let p = pv(&[(1, -70, -50), (2, -60, -55), (4, -60, -40), (5, -60, -40)]);
        assert!((vcontact_similarity(&a, &p) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn jaccard_examples() {
        let a = v(&[(1, -1), (2, -1)]);
        assert_eq!(jaccard(&a, &a), 1.0);
        assert_eq!(jaccard(&a, &v(&[(3, -1)])), 0.0);
        assert_eq!(jaccard(&a, &v(&[(2, -9), (3, -1)])), 1.0 / 3.0);
        assert_eq!(jaccard(&v(&[]), &v(&[])), 0.0);
    }

    #[test]
    fn baseline_examples() {
        let a = v(&[(1, -50), (2, -70)]);
        assert_eq!(amd(&a, &a).unwrap(), 0.0);
        assert_eq!(aed(&a, &a).unwrap(), 0.0);

        let a = v(&[(1, -50)]);
        let b = v(&[(1, -60)]);
        assert_eq!(amd(&a, &b).unwrap(), 10.0);
        assert_eq!(aed(&a, &b).unwrap(), 10.0);

        let b = v(&[(2, -60)]);
        assert_eq!(amd(&a, &b).unwrap(), 45.0);
        assert_eq!(aed(&a, &b).unwrap(), (50.0f64 * 50.0 + 40.0 * 40.0).sqrt() / 2.0);
        assert_eq!(amd_with(&a, &b, BaselineDenominator::Shared).unwrap(), f64::INFINITY);

        assert_eq!(amd(&v(&[]), &v(&[])), Err(MetricError::BothEmpty));
        assert_eq!(aed(&v(&[]), &v(&[])), Err(MetricError::BothEmpty));
    }

    #[test]
    fn shared_denominator_counts_pre_fill_overlap() {
        let a = v(&[(1, -50), (2, -70)]);
        let b = v(&[(1, -54)]);
        // |−50 − −54| + |−70 − −100| = 34 over one shared id
        assert_eq!(amd_with(&a, &b, BaselineDenominator::Shared).unwrap(), 34.0);
        assert_eq!(amd(&a, &b).unwrap(), 17.0);
    }
}
