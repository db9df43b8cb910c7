//! Site presets standing in for an office, an outdoor bus station and a
//! store in a shopping mall.
//!
//! AP layouts are generated from a fixed per-site seed, so a preset is the
//! same physical site on every run; experiment seeds only drive scan noise.
//! Detection floors are tuned so the mean scan size of the default device
//! inside the area lands near 19.0, 24.0 and 46.3 APs respectively.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{AccessPoint, DeviceParams, Point, Rect, SimEnvironment};
use crate::error::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SitePreset {
    Office,
    BusStation,
    Mall,
}

impl SitePreset {
    pub const ALL: [SitePreset; 3] = [SitePreset::Office, SitePreset::BusStation, SitePreset::Mall];

    pub fn name(self) -> &'static str {
        match self {
            SitePreset::Office => "office",
            SitePreset::BusStation => "bus-station",
            SitePreset::Mall => "mall",
        }
    }

    /// Mean number of APs per scan the preset is tuned towards.
    pub fn target_scan_size(self) -> f64 {
        match self {
            SitePreset::Office => 19.02,
            SitePreset::BusStation => 24.0,
            SitePreset::Mall => 46.29,
        }
    }

    pub fn build(self) -> Site {
        let p = self.params();
        let area = Rect::new(Point::new(0.0, 0.0), Point::new(p.width, p.height));
        let spread = area.expand(p.margin);
        let mut rng = ChaCha8Rng::seed_from_u64(p.layout_seed);
        let aps = (0..p.ap_count)
            .map(|i| {
                let pos = Point::new(
                    rng.random_range(spread.min.x..spread.max.x),
                    rng.random_range(spread.min.y..spread.max.y),
                );
                AccessPoint::synthetic(p.id_base + i, pos, rng.random_range(-45.0..-35.0))
            })
            .collect();
        let env = SimEnvironment::new(aps, p.path_loss_exponent, p.shadowing_std, p.detection_floor, p.layout_seed)
            .expect("preset parameters are valid");
        Site { preset: self, env, area, anchor: area.center() }
    }

    fn params(self) -> PresetParams {
        match self {
            SitePreset::Office => PresetParams {
                width: 10.0,
                height: 12.0,
                margin: 20.0,
                ap_count: 32,
                path_loss_exponent: 3.0,
                shadowing_std: 3.0,
                detection_floor: -81,
                layout_seed: 0x0FF1CE,
                id_base: 0x0100_0000,
            },
            SitePreset::BusStation => PresetParams {
                width: 15.0,
                height: 2.0,
                margin: 60.0,
                ap_count: 109,
                path_loss_exponent: 2.7,
                shadowing_std: 3.0,
                detection_floor: -80,
                layout_seed: 0xB05,
                id_base: 0x0200_0000,
            },
            SitePreset::Mall => PresetParams {
                width: 20.0,
                height: 25.0,
                margin: 45.0,
                ap_count: 301,
                path_loss_exponent: 2.7,
                shadowing_std: 3.0,
                detection_floor: -77,
                layout_seed: 0x3A11,
                id_base: 0x0300_0000,
            },
        }
    }
}

impl fmt::Display for SitePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SitePreset {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "office" => Ok(SitePreset::Office),
            "bus-station" | "bus_station" => Ok(SitePreset::BusStation),
            "mall" | "shopping-mall" => Ok(SitePreset::Mall),
            other => Err(SimError::invalid("preset", format!("unknown site {other:?}"))),
        }
    }
}

struct PresetParams {
    width: f64,
    height: f64,
    margin: f64,
    ap_count: u32,
    path_loss_exponent: f64,
    shadowing_std: f64,
    detection_floor: i32,
    layout_seed: u64,
    id_base: u32,
}

/// A simulated site: environment, the surveyed area and the reference
/// location where the confirmed case stands in proximity experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct Site {
    pub preset: SitePreset,
    pub env: SimEnvironment,
    pub area: Rect,
    pub anchor: Point,
}

/// Receiver presets named after the phones whose mean scan sizes in a mall
/// were 75.00, 128.12, 180.16, 92.87 and 102.09 APs. Detection rates are
/// proportional to those counts; biases are small, fixed offsets.
pub fn device_preset(name: &str) -> Option<DeviceParams> {
    let (bias, count) = match name {
        "reference" => return Some(DeviceParams::default()),
        "ideal" => return Some(DeviceParams::IDEAL),
        "honor" => (-2.0, 75.00),
        "mate30" => (1.0, 128.12),
        "oppo" => (0.0, 180.16),
        "nova" => (-1.0, 92.87),
        "xiaomi" => (2.0, 102.09),
        _ => return None,
    };
    Some(DeviceParams { bias, detect_rate: count / 180.16 })
}

pub const DEVICE_NAMES: [&str; 5] = ["honor", "mate30", "oppo", "nova", "xiaomi"];
