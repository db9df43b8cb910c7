//! Precision, recall and F1 over ground-truth and detected sets.

use std::collections::BTreeSet;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// From the overlap size and the two set sizes.
    ///
    /// An empty detected set has precision 1 when the truth is empty too and
    /// 0 otherwise; an empty truth has recall 1.
    pub fn from_counts(overlap: usize, truth: usize, detected: usize) -> Prf {
        debug_assert!(overlap <= truth.min(detected));
        let precision = match (detected, truth) {
            (0, 0) => 1.0,
            (0, _) => 0.0,
            _ => overlap as f64 / detected as f64,
        };
        let recall = if truth == 0 { 1.0 } else { overlap as f64 / truth as f64 };
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Prf { precision, recall, f1 }
    }
}

pub fn precision_recall_f1<T: Ord>(truth: &BTreeSet<T>, detected: &BTreeSet<T>) -> Prf {
    Prf::from_counts(truth.intersection(detected).count(), truth.len(), detected.len())
}

/// Same as [`precision_recall_f1`] with the sets given as parallel label and
/// decision slices.
pub fn prf_from_labels(truth: &[bool], detected: &[bool]) -> Prf {
    assert_eq!(truth.len(), detected.len(), "label slices differ in length");
    let (mut tp, mut t, mut d) = (0, 0, 0);
    for (&a, &b) in truth.iter().zip(detected) {
        tp += usize::from(a && b);
        t += usize::from(a);
        d += usize::from(b);
    }
    Prf::from_counts(tp, t, d)
}
