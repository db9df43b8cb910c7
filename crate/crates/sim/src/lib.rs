//! Synthetic WiFi scans with known ground truth.
//!
//! Signal strength follows a log-distance path-loss model with Gaussian
//! shadowing; every random draw is addressed by a counter-based key, so a
//! given `(environment, seed)` always reproduces the same profiles.

pub mod env;
pub mod error;
pub mod perturb;
pub mod presets;
mod rng;
pub mod scan;
pub mod scenario;

pub use env::{AccessPoint, DeviceParams, Point, Rect, SimEnvironment, SimTrajectory};
pub use error::SimError;
pub use perturb::{perturb_filter_aps, perturb_rssi_noise};
pub use presets::{device_preset, Site, SitePreset, DEVICE_NAMES};
pub use rng::derive_seed;
pub use scan::{make_paired_scenario, sample_scan, simulate_profile, PairSpec, PairedScenario, ScanKey};
pub use scenario::{GeneratedScenario, GroundTruthRow, ScenarioConfig};
