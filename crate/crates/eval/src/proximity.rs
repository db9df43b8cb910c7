//! Contact-proximity studies: a confirmed case stands at the site anchor
//! while users stand at known distances around it.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;
use vcontact_core::{build_case_profile, LifespanSchedule, ProcessedProfile, SignalProfile, SignalVector};
use vcontact_sim::{derive_seed, device_preset, simulate_profile, DeviceParams, Point, Site, SimTrajectory};

use crate::calibration::{sweep_scores, CalibrationCurve, Direction, LabeledDataset, LabeledRecord};
use crate::config::StudyConfig;
use crate::error::EvalError;

/// Simulated case and user scans for one seed.
#[derive(Clone, Debug, PartialEq)]
pub struct ProximityData {
    pub case_profile: SignalProfile,
    pub processed: ProcessedProfile,
    /// User scans with their true distance to the case.
    pub records: Vec<(SignalVector, f64)>,
}

impl ProximityData {
    pub fn labels(&self, k: f64) -> Vec<bool> {
        self.records.iter().map(|(_, d)| within(*d, k)).collect()
    }

    pub fn dataset(&self, k: f64) -> LabeledDataset {
        LabeledDataset {
            records: self
                .records
                .iter()
                .map(|(v, d)| LabeledRecord { vector: v.clone(), contact: within(*d, k), distance: *d })
                .collect(),
            processed: self.processed.clone(),
        }
    }

    pub fn scores(&self) -> Vec<f64> {
        self.dataset(0.0).scores()
    }
}

fn within(distance: f64, k: f64) -> bool {
    distance <= k + 1e-9
}

pub(crate) fn device(name: &str) -> Result<DeviceParams, EvalError> {
    device_preset(name).ok_or_else(|| EvalError::Config(format!("unknown device {name:?}")))
}

/// User positions: `bearings` points on each circle of radius `d` around
/// `anchor`, the circles rotated against each other.
pub fn user_positions(anchor: Point, distances: &[f64], bearings: u32) -> Vec<(Point, f64)> {
    let mut out = Vec::with_capacity(distances.len() * bearings as usize);
    for (ring, &d) in distances.iter().enumerate() {
        for b in 0..bearings {
            let theta = TAU * (f64::from(b) + 0.5 * (ring % 2) as f64) / f64::from(bearings) + 0.3 * ring as f64;
            out.push((Point::new(anchor.x + d * theta.cos(), anchor.y + d * theta.sin()), d));
        }
    }
    out
}

/// Runs one seed. The case scans first; users scan `user_offset` seconds
/// later, and the case profile's lifespan decides which segments are still
/// active for them.
pub fn simulate_proximity(site: &Site, cfg: &StudyConfig, seed: u64) -> Result<ProximityData, EvalError> {
    let case_dev = device(&cfg.case_device)?;
    let user_dev = device(&cfg.user_device)?;
    let env = &site.env;
    let case_traj = SimTrajectory::stationary(site.anchor, cfg.start, cfg.duration, case_dev)?;
    let case_profile = simulate_profile(env, &case_traj, cfg.sampling_period, derive_seed(seed, 0))?;
    let processed = build_case_profile(&case_profile, &LifespanSchedule::uniform(cfg.lifespan), "case")?;
    let positions = user_positions(site.anchor, &cfg.distances, cfg.bearings);
    let mut records = Vec::new();
    for (j, (pos, d)) in positions.into_iter().enumerate() {
        let traj = SimTrajectory::stationary(pos, cfg.start + cfg.user_offset, cfg.duration, user_dev)?;
        let profile = simulate_profile(env, &traj, cfg.sampling_period, derive_seed(seed, 1 + j as u64))?;
        records.extend(profile.into_vectors().into_iter().map(|v| (v, d)));
    }
    Ok(ProximityData { case_profile, processed, records })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProximityRow {
    pub seed: u64,
    pub k: f64,
    pub alpha: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Calibrates at each proximity on precomputed scores.
pub fn evaluate_proximities(
    seed: u64,
    data: &ProximityData,
    scores: &[f64],
    cfg: &StudyConfig,
) -> Result<Vec<(ProximityRow, CalibrationCurve)>, EvalError> {
    let grid = cfg.alpha_grid()?;
    cfg.proximities
        .iter()
        .map(|&k| {
            let curve = sweep_scores(scores, &data.labels(k), &grid, Direction::AtLeast)?;
            let p = *curve.intersection();
            Ok((ProximityRow { seed, k, alpha: p.alpha, precision: p.precision, recall: p.recall, f1: p.f1 }, curve))
        })
        .collect()
}

/// One row per `(seed, k)`, seeds in config order.
pub fn run_proximity_study(site: &Site, cfg: &StudyConfig) -> Result<Vec<ProximityRow>, EvalError> {
    let per_seed: Vec<Result<Vec<ProximityRow>, EvalError>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let data = simulate_proximity(site, cfg, seed)?;
            let scores = data.scores();
            Ok(evaluate_proximities(seed, &data, &scores, cfg)?.into_iter().map(|(row, _)| row).collect())
        })
        .collect();
    Ok(per_seed.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect())
}
