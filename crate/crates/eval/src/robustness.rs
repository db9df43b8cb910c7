//! Robustness tables: AP filtering on the case side, RSSI noise on the user
//! side, sampling period while walking, and device pairs. Every setting is
//! calibrated at its own precision/recall intersection for contact
//! proximity `k`.

use rayon::prelude::*;
use serde::Serialize;
use vcontact_core::{build_case_profile, LifespanSchedule, SignalProfile};
use vcontact_sim::{
    derive_seed, perturb_filter_aps, perturb_rssi_noise, simulate_profile, Point, SimTrajectory, Site,
};

use crate::calibration::{sweep_scores, Direction};
use crate::config::{RobustnessConfig, StudyConfig};
use crate::error::EvalError;
use crate::proximity::{device, simulate_proximity, ProximityData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    FilterRate,
    NoiseStd,
    SamplingPeriod,
    DevicePair,
}

impl Knob {
    pub fn name(self) -> &'static str {
        match self {
            Knob::FilterRate => "filter_rate",
            Knob::NoiseStd => "noise_std",
            Knob::SamplingPeriod => "sampling_period",
            Knob::DevicePair => "device_pair",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustnessRow {
    pub knob: Knob,
    pub setting: String,
    pub seed: u64,
    pub k: f64,
    pub alpha: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RobustnessReport {
    pub filter: Vec<RobustnessRow>,
    pub noise: Vec<RobustnessRow>,
    pub sampling: Vec<RobustnessRow>,
    pub devices: Vec<RobustnessRow>,
}

impl RobustnessReport {
    pub fn tables(&self) -> [(Knob, &[RobustnessRow]); 4] {
        [
            (Knob::FilterRate, &self.filter),
            (Knob::NoiseStd, &self.noise),
            (Knob::SamplingPeriod, &self.sampling),
            (Knob::DevicePair, &self.devices),
        ]
    }
}

fn calibrated_row(
    knob: Knob,
    setting: String,
    seed: u64,
    data: &ProximityData,
    cfg: &StudyConfig,
) -> Result<RobustnessRow, EvalError> {
    let curve = sweep_scores(&data.scores(), &data.labels(cfg.k), &cfg.alpha_grid()?, Direction::AtLeast)?;
    let p = curve.intersection();
    Ok(RobustnessRow {
        knob,
        setting,
        seed,
        k: cfg.k,
        alpha: p.alpha,
        precision: p.precision,
        recall: p.recall,
        f1: p.f1,
    })
}

fn with_case_profile(data: &ProximityData, case: SignalProfile, cfg: &StudyConfig) -> Result<ProximityData, EvalError> {
    let processed = build_case_profile(&case, &LifespanSchedule::uniform(cfg.lifespan), "case")?;
    Ok(ProximityData { case_profile: case, processed, records: data.records.clone() })
}

fn setting(v: f64) -> String {
    format!("{v}")
}

/// Removes a fraction of the case's distinct IDs before processing.
pub fn filter_table(site: &Site, cfg: &StudyConfig, rates: &[f64]) -> Result<Vec<RobustnessRow>, EvalError> {
    per_seed(cfg, |seed| {
        let base = simulate_proximity(site, cfg, seed)?;
        rates
            .iter()
            .map(|&rate| {
                let case = perturb_filter_aps(&base.case_profile, rate, derive_seed(seed, 0xF1))?;
                calibrated_row(Knob::FilterRate, setting(rate), seed, &with_case_profile(&base, case, cfg)?, cfg)
            })
            .collect()
    })
}

/// Adds Gaussian noise to every user reading.
pub fn noise_table(site: &Site, cfg: &StudyConfig, stds: &[f64]) -> Result<Vec<RobustnessRow>, EvalError> {
    per_seed(cfg, |seed| {
        let base = simulate_proximity(site, cfg, seed)?;
        stds.iter()
            .map(|&std| {
                let mut data = base.clone();
                for (j, (v, _)) in data.records.iter_mut().enumerate() {
                    let single = SignalProfile::new(vec![v.clone()], None)?;
                    let noisy = perturb_rssi_noise(&single, std, derive_seed(seed, 0x7000_0000 + j as u64))?;
                    *v = noisy.into_vectors().pop().expect("one vector in, one out");
                }
                calibrated_row(Knob::NoiseStd, setting(std), seed, &data, cfg)
            })
            .collect()
    })
}

/// Case and users walk back and forth along parallel lines through the
/// anchor, users offset sideways by their distance; everyone samples at the
/// given period.
pub fn simulate_walk(site: &Site, cfg: &StudyConfig, seed: u64, period: i64) -> Result<ProximityData, EvalError> {
    const LEG: f64 = 30.0;
    const LEG_SECONDS: i64 = 60;
    let walk = |side: f64, dev| -> Result<SimTrajectory, EvalError> {
        let legs = (cfg.duration + LEG_SECONDS - 1) / LEG_SECONDS;
        let waypoints = (0..=legs)
            .map(|i| {
                let dx = if i % 2 == 0 { -LEG / 2.0 } else { LEG / 2.0 };
                (cfg.start + i * LEG_SECONDS, Point::new(site.anchor.x + dx, site.anchor.y + side))
            })
            .collect();
        Ok(SimTrajectory::new(waypoints, dev)?)
    };
    let case_traj = walk(0.0, device(&cfg.case_device)?)?;
    let case_profile = simulate_profile(&site.env, &case_traj, period, derive_seed(seed, 0))?;
    let processed = build_case_profile(&case_profile, &LifespanSchedule::uniform(cfg.lifespan), "case")?;
    let user_dev = device(&cfg.user_device)?;
    let mut records = Vec::new();
    let sides = cfg.distances.iter().flat_map(|&d| [(d, d), (-d, d)]);
    for (j, (side, d)) in sides.enumerate() {
        let traj = walk(side, user_dev)?;
        let profile = simulate_profile(&site.env, &traj, period, derive_seed(seed, 1 + j as u64))?;
        records.extend(profile.into_vectors().into_iter().map(|v| (v, d)));
    }
    Ok(ProximityData { case_profile, processed, records })
}

pub fn sampling_table(site: &Site, cfg: &StudyConfig, periods: &[i64]) -> Result<Vec<RobustnessRow>, EvalError> {
    per_seed(cfg, |seed| {
        periods
            .iter()
            .map(|&period| {
                let data = simulate_walk(site, cfg, seed, period)?;
                calibrated_row(Knob::SamplingPeriod, period.to_string(), seed, &data, cfg)
            })
            .collect()
    })
}

pub fn device_table(
    site: &Site,
    cfg: &StudyConfig,
    pairs: &[(String, String)],
) -> Result<Vec<RobustnessRow>, EvalError> {
    per_seed(cfg, |seed| {
        pairs
            .iter()
            .map(|(case, user)| {
                let pair_cfg = StudyConfig { case_device: case.clone(), user_device: user.clone(), ..cfg.clone() };
                let data = simulate_proximity(site, &pair_cfg, seed)?;
                calibrated_row(Knob::DevicePair, format!("{case}/{user}"), seed, &data, cfg)
            })
            .collect()
    })
}

pub fn run_robustness_suite(site: &Site, cfg: &StudyConfig, knobs: &RobustnessConfig) -> Result<RobustnessReport, EvalError> {
    Ok(RobustnessReport {
        filter: filter_table(site, cfg, &knobs.filter_rates)?,
        noise: noise_table(site, cfg, &knobs.noise_stds)?,
        sampling: sampling_table(site, cfg, &knobs.sampling_periods)?,
        devices: device_table(site, cfg, &knobs.device_pairs)?,
    })
}

/// Runs `f` for every seed in parallel, concatenating in seed order.
fn per_seed<F>(cfg: &StudyConfig, f: F) -> Result<Vec<RobustnessRow>, EvalError>
where
    F: Fn(u64) -> Result<Vec<RobustnessRow>, EvalError> + Sync,
{
    let results: Vec<_> = cfg.seeds.par_iter().map(|&s| f(s)).collect();
    Ok(results.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect())
}
