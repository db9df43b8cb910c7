//! Threshold sweeps and precision/recall intersection.

use serde::Serialize;
use vcontact_core::{best_match, ProcessedProfile, SignalVector};

use crate::error::EvalError;
use crate::metrics::Prf;

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledRecord {
    pub vector: SignalVector,
    pub contact: bool,
    pub distance: f64,
}

/// User scans with ground truth, matched against one processed profile.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub records: Vec<LabeledRecord>,
    pub processed: ProcessedProfile,
}

impl LabeledDataset {
    /// Best similarity of each record against the segments active at its
    /// timestamp; 0 when none is active.
    pub fn scores(&self) -> Vec<f64> {
        let published = std::slice::from_ref(&self.processed);
        self.records.iter().map(|r| best_match(&r.vector, published).map_or(0.0, |(s, _, _)| s)).collect()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.contact).collect()
    }
}

/// Whether a record is detected when its score is at least or at most the
/// threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    AtLeast,
    AtMost,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub alpha: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub detected: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationCurve {
    pub points: Vec<CalibrationPoint>,
    pub intersection_alpha: f64,
}

impl CalibrationCurve {
    pub fn intersection(&self) -> &CalibrationPoint {
        self.points.iter().find(|p| p.alpha == self.intersection_alpha).expect("intersection is a grid point")
    }

    pub fn at(&self, alpha: f64) -> Option<&CalibrationPoint> {
        self.points.iter().find(|p| p.alpha == alpha)
    }
}

/// `0.01, 0.02, ..., 1.00`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=100).map(|i| f64::from(i) / 100.0).collect()
}

/// Sweeps `alpha` over `grid`, flagging records whose best similarity
/// reaches it.
pub fn sweep_threshold(data: &LabeledDataset, grid: &[f64]) -> Result<CalibrationCurve, EvalError> {
    if let Some(bad) = grid.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
        return Err(EvalError::InvalidGrid(format!("{bad} outside (0, 1]")));
    }
    if data.records.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    sweep_scores(&data.scores(), &data.labels(), grid, Direction::AtLeast)
}

/// Sweeps a threshold over precomputed scores.
///
/// The intersection is the grid point minimizing `|precision - recall|`,
/// smaller thresholds winning ties. Points where precision and recall are
/// both 0 are skipped unless every point is like that.
pub fn sweep_scores(
    scores: &[f64],
    labels: &[bool],
    grid: &[f64],
    direction: Direction,
) -> Result<CalibrationCurve, EvalError> {
    assert_eq!(scores.len(), labels.len(), "scores and labels differ in length");
    if grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    if grid.iter().any(|a| !a.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EvalError::InvalidGrid("grid must be finite and strictly ascending".into()));
    }
    let mut all: Vec<f64> = scores.to_vec();
    let mut positive: Vec<f64> = scores.iter().zip(labels).filter(|(_, &l)| l).map(|(s, _)| *s).collect();
    all.sort_by(f64::total_cmp);
    positive.sort_by(f64::total_cmp);
    let count = |sorted: &[f64], t: f64| match direction {
        Direction::AtLeast => sorted.len() - sorted.partition_point(|s| *s < t),
        Direction::AtMost => sorted.partition_point(|s| *s <= t),
    };
    let points: Vec<CalibrationPoint> = grid
        .iter()
        .map(|&alpha| {
            let detected = count(&all, alpha);
            let m = Prf::from_counts(count(&positive, alpha), positive.len(), detected);
            CalibrationPoint { alpha, precision: m.precision, recall: m.recall, f1: m.f1, detected }
        })
        .collect();
    let degenerate = |p: &CalibrationPoint| p.precision == 0.0 && p.recall == 0.0;
    let all_degenerate = points.iter().all(degenerate);
    let mut best: Option<&CalibrationPoint> = None;
    for p in points.iter().filter(|p| all_degenerate || !degenerate(p)) {
        let gap = (p.precision - p.recall).abs();
        if best.is_none_or(|b| gap < (b.precision - b.recall).abs()) {
            best = Some(p);
        }
    }
    let intersection_alpha = best.expect("grid is non-empty").alpha;
    Ok(CalibrationCurve { points, intersection_alpha })
}

/// Every distinct score, ascending; the finest grid that can tell two
/// thresholds apart.
pub fn distinct_score_grid(scores: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = scores.iter().copied().filter(|s| s.is_finite()).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}
