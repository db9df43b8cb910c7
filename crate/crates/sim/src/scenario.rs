//! TOML scenario files: environment, trajectories and perturbations, plus
//! free-form `[study]` and `[robustness]` tables consumed by the evaluation
//! tools.
//!
//! ```toml
//! seed = 7
//!
//! [environment]
//! preset = "office"
//!
//! [[trajectory]]
//! name = "case"
//! device = "reference"
//! sampling_period = 5
//! waypoints = [[0, 5.0, 6.0], [600, 5.0, 6.0]]
//!
//! [[perturbation]]
//! target = "case"
//! kind = "filter"
//! value = 0.5
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vcontact_core::{hash_mac, serialize_signal_profile, SignalProfile, Timestamp};

use crate::env::{AccessPoint, DeviceParams, Point, SimEnvironment, SimTrajectory, SIM_SALT};
use crate::error::SimError;
use crate::perturb::{perturb_filter_aps, perturb_rssi_noise};
use crate::presets::{device_preset, Site, SitePreset};
use crate::rng::derive_seed;
use crate::scan::simulate_profile;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub environment: EnvironmentConfig,
    #[serde(default, rename = "trajectory")]
    pub trajectories: Vec<TrajectoryConfig>,
    #[serde(default, rename = "perturbation")]
    pub perturbations: Vec<PerturbationConfig>,
    pub study: Option<toml::Table>,
    pub robustness: Option<toml::Table>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub preset: Option<String>,
    #[serde(default)]
    pub aps: Vec<ApConfig>,
    /// Salt for hashing `aps[].mac`; defaults to the simulator salt.
    pub salt: Option<String>,
    pub path_loss_exponent: Option<f64>,
    pub shadowing_std: Option<f64>,
    pub detection_floor: Option<i32>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApConfig {
    pub mac: String,
    pub x: f64,
    pub y: f64,
    #[serde(default = "default_tx_power")]
    pub tx_power: f64,
}

fn default_tx_power() -> f64 {
    -40.0
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub name: String,
    /// Device preset name; `bias` and `detect_rate` override its fields.
    pub device: Option<String>,
    pub bias: Option<f64>,
    pub detect_rate: Option<f64>,
    #[serde(default = "default_sampling_period")]
    pub sampling_period: i64,
    pub seed: Option<u64>,
    /// `[time, x, y]` triples.
    pub waypoints: Vec<(i64, f64, f64)>,
}

fn default_sampling_period() -> i64 {
    5
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    Filter,
    Noise,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub target: String,
    pub kind: PerturbationKind,
    /// Filter rate in `[0, 1]` or noise std in dB.
    pub value: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, SimError> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = fs::read_to_string(path).map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<(), SimError> {
        let mut names = std::collections::BTreeSet::new();
        for t in &self.trajectories {
            if t.name.is_empty() || !t.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(SimError::Config(format!("trajectory name {:?} must be [A-Za-z0-9_-]+", t.name)));
            }
            if !names.insert(t.name.as_str()) {
                return Err(SimError::Config(format!("duplicate trajectory {:?}", t.name)));
            }
        }
        for p in &self.perturbations {
            if !names.contains(p.target.as_str()) {
                return Err(SimError::Config(format!("perturbation targets unknown trajectory {:?}", p.target)));
            }
        }
        Ok(())
    }

    /// The preset site, when the environment names one.
    pub fn site(&self) -> Result<Option<Site>, SimError> {
        let env = &self.environment;
        match (&env.preset, env.aps.is_empty()) {
            (Some(_), false) => Err(SimError::Config("environment: give either preset or aps, not both".into())),
            (Some(name), true) => Ok(Some(name.parse::<SitePreset>().map_err(|e| SimError::Config(e.to_string()))?.build())),
            (None, false) => Ok(None),
            (None, true) => Ok(Some(SitePreset::Office.build())),
        }
    }

    pub fn build_environment(&self) -> Result<SimEnvironment, SimError> {
        let cfg = &self.environment;
        let base = match self.site()? {
            Some(site) => site.env,
            None => {
                let salt = cfg.salt.as_deref().map_or(SIM_SALT, str::as_bytes);
                let aps = cfg
                    .aps
                    .iter()
                    .map(|ap| {
                        Ok(AccessPoint { id: hash_mac(&ap.mac, salt)?, position: Point::new(ap.x, ap.y), tx_power: ap.tx_power })
                    })
                    .collect::<Result<Vec<_>, SimError>>()?;
                SimEnvironment::new(
                    aps,
                    SimEnvironment::DEFAULT_PATH_LOSS_EXPONENT,
                    SimEnvironment::DEFAULT_SHADOWING_STD,
                    SimEnvironment::DEFAULT_DETECTION_FLOOR,
                    0,
                )?
            }
        };
        let env = SimEnvironment::new(
            base.aps().to_vec(),
            cfg.path_loss_exponent.unwrap_or(base.path_loss_exponent()),
            cfg.shadowing_std.unwrap_or(base.shadowing_std()),
            cfg.detection_floor.unwrap_or(base.detection_floor()),
            base.seed(),
        )?;
        Ok(match self.seed {
            Some(seed) => env.with_seed(seed),
            None => env,
        })
    }

    /// Simulates every trajectory, applies perturbations in file order and
    /// records ground truth.
    pub fn generate(&self) -> Result<GeneratedScenario, SimError> {
        let env = self.build_environment()?;
        let root = self.seed.unwrap_or(0);
        let mut trajectories = Vec::with_capacity(self.trajectories.len());
        let mut profiles = Vec::with_capacity(self.trajectories.len());
        for (index, t) in self.trajectories.iter().enumerate() {
            let traj = t.build()?;
            let seed = t.seed.unwrap_or_else(|| derive_seed(root, index as u64));
            let mut profile = simulate_profile(&env, &traj, t.sampling_period, seed)?;
            for p in self.perturbations.iter().filter(|p| p.target == t.name) {
                profile = match p.kind {
                    PerturbationKind::Filter => perturb_filter_aps(&profile, p.value, p.seed)?,
                    PerturbationKind::Noise => perturb_rssi_noise(&profile, p.value, p.seed)?,
                };
            }
            let profile = SignalProfile::new(profile.vectors().to_vec(), Some(t.name.clone()))?;
            profiles.push((t.name.clone(), profile));
            trajectories.push((t.name.clone(), traj));
        }
        let ground_truth = ground_truth(&trajectories, &profiles);
        Ok(GeneratedScenario { profiles, ground_truth })
    }
}

impl TrajectoryConfig {
    pub fn device_params(&self) -> Result<DeviceParams, SimError> {
        let base = match &self.device {
            Some(name) => device_preset(name).ok_or_else(|| SimError::Config(format!("unknown device {name:?}")))?,
            None => DeviceParams::default(),
        };
        DeviceParams::new(self.bias.unwrap_or(base.bias), self.detect_rate.unwrap_or(base.detect_rate))
    }

    pub fn build(&self) -> Result<SimTrajectory, SimError> {
        let waypoints = self.waypoints.iter().map(|&(t, x, y)| (t, Point::new(x, y))).collect();
        SimTrajectory::new(waypoints, self.device_params()?)
    }
}

/// One scan of one trajectory and its true distance to another trajectory
/// active at the same instant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundTruthRow {
    pub trajectory: String,
    pub t: Timestamp,
    pub x: f64,
    pub y: f64,
    pub other: String,
    pub distance: f64,
}

fn ground_truth(trajectories: &[(String, SimTrajectory)], profiles: &[(String, SignalProfile)]) -> Vec<GroundTruthRow> {
    let mut rows = Vec::new();
    for ((name, traj), (_, profile)) in trajectories.iter().zip(profiles) {
        for v in profile.vectors() {
            let t = v.timestamp();
            let here = traj.position_at(t);
            for (other_name, other) in trajectories.iter().filter(|(n, _)| n != name) {
                if t < other.start() || t > other.end() {
                    continue;
                }
                rows.push(GroundTruthRow {
                    trajectory: name.clone(),
                    t,
                    x: here.x,
                    y: here.y,
                    other: other_name.clone(),
                    distance: here.distance(&other.position_at(t)),
                });
            }
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedScenario {
    pub profiles: Vec<(String, SignalProfile)>,
    pub ground_truth: Vec<GroundTruthRow>,
}

impl GeneratedScenario {
    pub fn profile(&self, name: &str) -> Option<&SignalProfile> {
        self.profiles.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    /// Columns: `trajectory,t,x,y,other,distance`.
    pub fn ground_truth_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.ground_truth {
            w.serialize(row).expect("in-memory write");
        }
        if self.ground_truth.is_empty() {
            w.write_record(["trajectory", "t", "x", "y", "other", "distance"]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Writes `<name>.profile` per trajectory and `ground_truth.csv` into
    /// `dir`, returning the written paths.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, profile) in &self.profiles {
            let path = dir.join(format!("{name}.profile"));
            fs::write(&path, serialize_signal_profile(profile))?;
            written.push(path);
        }
        let path = dir.join("ground_truth.csv");
        fs::write(&path, self.ground_truth_csv())?;
        written.push(path);
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = r#"
seed = 3

[environment]
preset = "office"
shadowing_std = 0.0

[[trajectory]]
name = "case"
device = "ideal"
waypoints = [[0, 5.0, 6.0], [60, 5.0, 6.0]]

[[trajectory]]
name = "user"
device = "ideal"
waypoints = [[30, 7.0, 6.0], [90, 7.0, 6.0]]

[[perturbation]]
target = "user"
kind = "filter"
value = 0.0
"#;

    #[test]
    fn parses_and_generates() {
        let cfg = ScenarioConfig::parse(PAIR).unwrap();
        let out = cfg.generate().unwrap();
        assert_eq!(out.profiles.len(), 2);
        assert_eq!(out.profile("case").unwrap().len(), 12);
        assert_eq!(out.profile("user").unwrap().device_tag(), Some("user"));
        // case sees user only from t=30 on; user sees case until t=60
        let case_rows = out.ground_truth.iter().filter(|r| r.trajectory == "case").count();
        let user_rows = out.ground_truth.iter().filter(|r| r.trajectory == "user").count();
        assert_eq!((case_rows, user_rows), (6, 7));
        assert!(out.ground_truth.iter().all(|r| (r.distance - 2.0).abs() < 1e-12));
        assert_eq!(out, cfg.generate().unwrap());
        assert!(out.ground_truth_csv().starts_with("trajectory,t,x,y,other,distance\n"));
    }

    #[test]
    fn custom_aps_and_overrides() {
        let cfg = ScenarioConfig::parse(
            r#"
[environment]
aps = [{ mac = "AA:BB:CC:DD:EE:FF", x = 0.0, y = 0.0 }]
shadowing_std = 0.0
path_loss_exponent = 2.0

[[trajectory]]
name = "a"
device = "ideal"
waypoints = [[0, 6.0, 8.0]]
"#,
        )
        .unwrap();
        let out = cfg.generate().unwrap();
        let v = &out.profile("a").unwrap().vectors()[0];
        assert_eq!(v.iter().map(|(_, r)| r.dbm()).collect::<Vec<_>>(), vec![-60]);
        assert!(out.ground_truth.is_empty());
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            "bogus = 1",
            "[environment]\npreset = \"garage\"\n[[trajectory]]\nname='a'\nwaypoints=[[0,0.0,0.0]]",
            "[[trajectory]]\nname = 'a'\nwaypoints = [[0, 0.0, 0.0]]\n[[trajectory]]\nname = 'a'\nwaypoints = [[0, 0.0, 0.0]]",
            "[[perturbation]]\ntarget = 'ghost'\nkind = 'noise'\nvalue = 1.0",
            "[[trajectory]]\nname = 'a b'\nwaypoints = [[0, 0.0, 0.0]]",
            "[[trajectory]]\nname = 'a'\nkind = 'x'\nwaypoints = [[0, 0.0, 0.0]]",
        ];
        for text in bad {
            let result = ScenarioConfig::parse(text).and_then(|c| c.generate());
            assert!(result.is_err(), "accepted {text:?}");
        }
        let both = "[environment]\npreset = 'office'\naps = [{ mac = 'AA:BB:CC:DD:EE:FF', x = 0.0, y = 0.0 }]";
        assert!(ScenarioConfig::parse(both).unwrap().build_environment().is_err());
        let lower = "[environment]\naps = [{ mac = 'aa:bb:cc:dd:ee:ff', x = 0.0, y = 0.0 }]";
        assert!(ScenarioConfig::parse(lower).unwrap().build_environment().is_err());
    }

    #[test]
    fn writes_files() {
        let dir = std::env::temp_dir().join(format!("vcontact-scenario-{}", std::process::id()));
        let out = ScenarioConfig::parse(PAIR).unwrap().generate().unwrap();
        let paths = out.write_to(&dir).unwrap();
        assert_eq!(paths.len(), 3);
        let text = fs::read(dir.join("case.profile")).unwrap();
        assert_eq!(vcontact_core::parse_signal_profile(&text).unwrap(), *out.profile("case").unwrap());
        fs::remove_dir_all(&dir).unwrap();
    }
}
