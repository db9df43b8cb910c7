//! `[study]` and `[robustness]` tables of a scenario file.

use serde::Deserialize;
use vcontact_sim::{ScenarioConfig, Site, SitePreset};

use crate::calibration::default_alpha_grid;
use crate::error::EvalError;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub seeds: Vec<u64>,
    /// Contact proximities `k`, meters.
    pub proximities: Vec<f64>,
    /// User distances from the case, meters.
    pub distances: Vec<f64>,
    /// Users per distance.
    pub bearings: u32,
    pub start: i64,
    pub duration: i64,
    /// Users start scanning this long after the case starts, seconds.
    pub user_offset: i64,
    pub sampling_period: i64,
    /// Lifespan applied to the case profile, seconds.
    pub lifespan: u32,
    pub case_device: String,
    pub user_device: String,
    /// Step of the alpha grid over `(0, 1]`.
    pub alpha_step: f64,
    /// Threshold for in-out detection.
    pub alpha: f64,
    /// Proximity used by robustness and baseline tables, meters.
    pub k: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            seeds: vec![1, 2, 3, 4, 5],
            proximities: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            distances: (1..=10).map(f64::from).collect(),
            bearings: 4,
            start: 0,
            duration: 600,
            user_offset: 600,
            sampling_period: 5,
            lifespan: 1800,
            case_device: "reference".into(),
            user_device: "reference".into(),
            alpha_step: 0.01,
            alpha: 0.2,
            k: 2.0,
        }
    }
}

impl StudyConfig {
    pub fn alpha_grid(&self) -> Result<Vec<f64>, EvalError> {
        if self.alpha_step == 0.01 {
            return Ok(default_alpha_grid());
        }
        if !(self.alpha_step > 0.0 && self.alpha_step <= 1.0) {
            return Err(EvalError::Config(format!("alpha_step {} outside (0, 1]", self.alpha_step)));
        }
        let n = (1.0 / self.alpha_step).round() as u32;
        Ok((1..=n).map(|i| f64::from(i) / f64::from(n)).collect())
    }

    fn validate(&self) -> Result<(), EvalError> {
        let bad = |what: &str| Err(EvalError::Config(what.to_string()));
        if self.seeds.is_empty() {
            return bad("study.seeds is empty");
        }
        if self.proximities.is_empty() || self.proximities.iter().any(|k| !(*k >= 0.0 && k.is_finite())) {
            return bad("study.proximities must be non-empty, finite and >= 0");
        }
        if self.distances.is_empty() || self.distances.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return bad("study.distances must be non-empty, finite and >= 0");
        }
        if self.bearings == 0 || self.duration <= 0 || self.sampling_period <= 0 {
            return bad("study.bearings, duration and sampling_period must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("study.alpha outside (0, 1]");
        }
        self.alpha_grid().map(|_| ())
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobustnessConfig {
    /// Fraction of the case's distinct IDs removed.
    pub filter_rates: Vec<f64>,
    /// Gaussian noise added to the user's readings, dB.
    pub noise_stds: Vec<f64>,
    /// Sampling periods for the walking scenario, seconds.
    pub sampling_periods: Vec<i64>,
    /// `[case device, user device]` preset names.
    pub device_pairs: Vec<(String, String)>,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig {
            filter_rates: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            noise_stds: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            sampling_periods: vec![5, 10, 20, 30, 60],
            device_pairs: vec![
                ("oppo".into(), "oppo".into()),
                ("oppo".into(), "mate30".into()),
                ("oppo".into(), "honor".into()),
                ("mate30".into(), "xiaomi".into()),
                ("nova".into(), "honor".into()),
            ],
        }
    }
}

impl RobustnessConfig {
    fn validate(&self) -> Result<(), EvalError> {
        if self.filter_rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(EvalError::Config("robustness.filter_rates must lie in [0, 1]".into()));
        }
        if self.noise_stds.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(EvalError::Config("robustness.noise_stds must be finite and >= 0".into()));
        }
        if self.sampling_periods.iter().any(|p| *p <= 0) {
            return Err(EvalError::Config("robustness.sampling_periods must be positive".into()));
        }
        Ok(())
    }
}

/// A scenario file resolved for the evaluation tools.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub site: Site,
    pub study: StudyConfig,
    pub robustness: RobustnessConfig,
}

impl Experiment {
    /// Studies need a preset site; environment overrides apply on top.
    pub fn from_scenario(scenario: &ScenarioConfig) -> Result<Self, EvalError> {
        let mut site = scenario
            .site()?
            .ok_or_else(|| EvalError::Config("studies need environment.preset".into()))?;
        site.env = scenario.build_environment()?;
        let study: StudyConfig = table(&scenario.study, "study")?;
        let robustness: RobustnessConfig = table(&scenario.robustness, "robustness")?;
        study.validate()?;
        robustness.validate()?;
        Ok(Experiment { site, study, robustness })
    }

    pub fn parse(text: &str) -> Result<Self, EvalError> {
        Self::from_scenario(&ScenarioConfig::parse(text)?)
    }

    pub fn preset(preset: SitePreset) -> Self {
        Experiment { site: preset.build(), study: StudyConfig::default(), robustness: RobustnessConfig::default() }
    }
}

fn table<T: for<'de> Deserialize<'de> + Default>(t: &Option<toml::Table>, name: &str) -> Result<T, EvalError> {
    match t {
        None => Ok(T::default()),
        Some(t) => toml::Value::Table(t.clone()).try_into().map_err(|e| EvalError::Config(format!("[{name}]: {e}"))),
    }
}
