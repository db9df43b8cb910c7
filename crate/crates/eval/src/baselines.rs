//! Jaccard, AMD and AED baselines scored against the case's raw scans.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use vcontact_core::{aed_with, amd_with, jaccard, BaselineDenominator, SignalProfile, SignalVector};

use crate::calibration::{distinct_score_grid, sweep_scores, Direction};
use crate::config::StudyConfig;
use crate::error::EvalError;
use crate::proximity::{simulate_proximity, ProximityData};
use vcontact_sim::Site;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Vcontact,
    Jaccard,
    Amd,
    Aed,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Vcontact, Method::Jaccard, Method::Amd, Method::Aed];

    pub fn name(self) -> &'static str {
        match self {
            Method::Vcontact => "vcontact",
            Method::Jaccard => "jaccard",
            Method::Amd => "amd",
            Method::Aed => "aed",
        }
    }

    fn direction(self) -> Direction {
        match self {
            Method::Vcontact | Method::Jaccard => Direction::AtLeast,
            Method::Amd | Method::Aed => Direction::AtMost,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Case scans whose interval is still active at `t`: the two endpoints of
/// every active segment, deduplicated.
fn active_case_scans<'a>(data: &'a ProximityData, t: i64) -> Vec<&'a SignalVector> {
    let case: &SignalProfile = &data.case_profile;
    let vectors = case.vectors();
    let mut idx: Vec<usize> = data
        .processed
        .active_at(t)
        .filter_map(|(_, seg)| vectors.binary_search_by_key(&seg.start(), |v| v.timestamp()).ok())
        .flat_map(|i| [i, i + 1])
        .filter(|&i| i < vectors.len())
        .collect();
    idx.dedup();
    idx.into_iter().map(|i| &vectors[i]).collect()
}

/// Best baseline score of each user scan: highest Jaccard, lowest AMD/AED.
/// Records with no active case scan score 0 (Jaccard) or `+inf`.
pub fn baseline_scores(data: &ProximityData, method: Method, denominator: BaselineDenominator) -> Vec<f64> {
    data.records
        .par_iter()
        .map(|(v, _)| {
            let scans = active_case_scans(data, v.timestamp());
            match method {
                Method::Vcontact => unreachable!("vcontact scores come from the processed profile"),
                Method::Jaccard => scans.iter().map(|c| jaccard(v, c)).fold(0.0, f64::max),
                Method::Amd | Method::Aed => scans
                    .iter()
                    .filter_map(|c| match method {
                        Method::Amd => amd_with(v, c, denominator).ok(),
                        _ => aed_with(v, c, denominator).ok(),
                    })
                    .fold(f64::INFINITY, f64::min),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaselineRow {
    pub seed: u64,
    pub k: f64,
    pub method: Method,
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Every method calibrated at its own precision/recall intersection. The
/// baselines sweep all distinct observed scores; vContact sweeps the alpha
/// grid.
pub fn compare_methods(
    seed: u64,
    data: &ProximityData,
    proximities: &[f64],
    cfg: &StudyConfig,
) -> Result<Vec<BaselineRow>, EvalError> {
    let mut rows = Vec::new();
    for method in Method::ALL {
        let (scores, grid) = match method {
            Method::Vcontact => (data.scores(), cfg.alpha_grid()?),
            _ => {
                let s = baseline_scores(data, method, BaselineDenominator::Union);
                let g = distinct_score_grid(&s);
                (s, g)
            }
        };
        for &k in proximities {
            let curve = sweep_scores(&scores, &data.labels(k), &grid, method.direction())?;
            let p = curve.intersection();
            rows.push(BaselineRow {
                seed,
                k,
                method,
                threshold: p.alpha,
                precision: p.precision,
                recall: p.recall,
                f1: p.f1,
            });
        }
    }
    Ok(rows)
}

pub fn run_baseline_comparison(site: &Site, cfg: &StudyConfig) -> Result<Vec<BaselineRow>, EvalError> {
    let per_seed: Vec<Result<Vec<BaselineRow>, EvalError>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| compare_methods(seed, &simulate_proximity(site, cfg, seed)?, &cfg.proximities, cfg))
        .collect();
    Ok(per_seed.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect())
}
