//! Scan synthesis with log-distance path loss and Gaussian shadowing.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use vcontact_core::{Rssi, SignalProfile, SignalVector, Timestamp};

use crate::env::{DeviceParams, Point, SimEnvironment, SimTrajectory};
use crate::error::SimError;
use crate::rng::{self, derive_seed};

/// Addresses the random draws of one scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanKey {
    pub seed: u64,
    pub scan_index: u64,
}

/// One scan at `position`.
///
/// Each AP's reading is `tx − 10·n·log10(max(d, 1)) + N(0, σ) + bias`,
/// rounded to whole dBm and clamped to `[-100, 0]`. The AP is reported when
/// the reading reaches the detection floor and a per-device detection draw
/// succeeds. Draws are keyed by `(env seed, key, AP index)`.
pub fn sample_scan(
    env: &SimEnvironment,
    position: Point,
    device: DeviceParams,
    key: ScanKey,
    timestamp: Timestamp,
) -> SignalVector {
    let seed = derive_seed(env.seed(), key.seed);
    let mut readings = BTreeMap::new();
    for (index, ap) in env.aps().iter().enumerate() {
        let mut rng = rng::keyed(seed, rng::SCAN, key.scan_index, index as u64);
        let shadow: f64 = rng.sample::<f64, _>(StandardNormal) * env.shadowing_std();
        let detect: f64 = rng.random();
        let raw = env.mean_rssi(ap, &position) + shadow + device.bias;
        let rssi = Rssi::clamped(raw.round() as i32);
        if rssi.dbm() >= env.detection_floor() && detect < device.detect_rate {
            readings.insert(ap.id, rssi);
        }
    }
    SignalVector::new(timestamp, readings)
}

/// Scans every `sampling_period` seconds from the trajectory's first
/// waypoint up to (excluding) its last. A single-waypoint trajectory yields
/// one scan.
pub fn simulate_profile(
    env: &SimEnvironment,
    trajectory: &SimTrajectory,
    sampling_period: i64,
    seed: u64,
) -> Result<SignalProfile, SimError> {
    if sampling_period <= 0 {
        return Err(SimError::invalid("sampling_period", "must be positive"));
    }
    let (start, end) = (trajectory.start(), trajectory.end());
    let count = if end == start { 1 } else { (end - start + sampling_period - 1) / sampling_period };
    let vectors = (0..count)
        .map(|k| {
            let t = start + k * sampling_period;
            let key = ScanKey { seed, scan_index: k as u64 };
            sample_scan(env, trajectory.position_at(t), trajectory.device(), key, t)
        })
        .collect();
    Ok(SignalProfile::new(vectors, None)?)
}

/// Two stationary devices a fixed distance apart.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSpec {
    pub anchor: Point,
    pub separation: f64,
    /// Bearing from the anchor to the second device, radians.
    pub bearing: f64,
    pub start: Timestamp,
    pub duration: i64,
    pub sampling_period: i64,
    pub seeds: (u64, u64),
    pub devices: (DeviceParams, DeviceParams),
}

impl Default for PairSpec {
    fn default() -> Self {
        PairSpec {
            anchor: Point::default(),
            separation: 0.0,
            bearing: 0.0,
            start: 0,
            duration: 600,
            sampling_period: 5,
            seeds: (1, 2),
            devices: (DeviceParams::default(), DeviceParams::default()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairedScenario {
    pub anchor_profile: SignalProfile,
    pub other_profile: SignalProfile,
    pub distance: f64,
}

pub fn make_paired_scenario(env: &SimEnvironment, setup: &PairSpec) -> Result<PairedScenario, SimError> {
    if !(setup.separation >= 0.0 && setup.separation.is_finite()) {
        return Err(SimError::invalid("separation", "must be finite and >= 0"));
    }
    let other = Point::new(
        setup.anchor.x + setup.separation * setup.bearing.cos(),
        setup.anchor.y + setup.separation * setup.bearing.sin(),
    );
    let a = SimTrajectory::stationary(setup.anchor, setup.start, setup.duration, setup.devices.0)?;
    let b = SimTrajectory::stationary(other, setup.start, setup.duration, setup.devices.1)?;
    Ok(PairedScenario {
        anchor_profile: simulate_profile(env, &a, setup.sampling_period, setup.seeds.0)?,
        other_profile: simulate_profile(env, &b, setup.sampling_period, setup.seeds.1)?,
        distance: setup.anchor.distance(&other),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::AccessPoint;

    fn one_ap_env(ap_pos: Point, n: f64, std: f64) -> SimEnvironment {
        SimEnvironment::new(vec![AccessPoint::synthetic(0, ap_pos, -40.0)], n, std, -100, 9).unwrap()
    }

    fn key(seed: u64) -> ScanKey {
        ScanKey { seed, scan_index: 0 }
    }

    #[test]
    fn zero_distance_zero_noise_reads_tx_power() {
        let env = one_ap_env(Point::new(3.0, 4.0), 2.5, 0.0);
        let v = sample_scan(&env, Point::new(3.0, 4.0), DeviceParams::IDEAL, key(1), 0);
        assert_eq!(v.iter().map(|(_, r)| r.dbm()).collect::<Vec<_>>(), vec![-40]);
    }

    #[test]
    fn ten_meters_at_exponent_two_loses_twenty_db() {
        let env = one_ap_env(Point::new(0.0, 0.0), 2.0, 0.0);
        let v = sample_scan(&env, Point::new(6.0, 8.0), DeviceParams::IDEAL, key(1), 0);
        assert_eq!(v.iter().map(|(_, r)| r.dbm()).collect::<Vec<_>>(), vec![-60]);
    }

    #[test]
    fn below_floor_is_not_reported() {
        let env = one_ap_env(Point::new(0.0, 0.0), 2.0, 0.0).with_detection_floor(-59);
        assert!(sample_scan(&env, Point::new(10.0, 0.0), DeviceParams::IDEAL, key(1), 0).is_empty());
    }

    #[test]
    fn bias_shifts_and_clamps() {
        let env = one_ap_env(Point::new(0.0, 0.0), 2.0, 0.0);
        let loud = DeviceParams::new(55.0, 1.0).unwrap();
        let v = sample_scan(&env, Point::new(0.0, 0.0), loud, key(1), 0);
        assert_eq!(v.iter().next().unwrap().1.dbm(), 0);
    }

    #[test]
    fn same_key_same_scan() {
        let env = one_ap_env(Point::new(0.0, 0.0), 2.5, 4.0);
        let a = sample_scan(&env, Point::new(2.0, 0.0), DeviceParams::default(), key(5), 0);
        let b = sample_scan(&env, Point::new(2.0, 0.0), DeviceParams::default(), key(5), 0);
        assert_eq!(a, b);
    }

    #[test]
    fn stationary_ten_minutes_at_five_seconds_is_120_scans() {
        let env = one_ap_env(Point::new(0.0, 0.0), 2.5, 3.0);
        let t = SimTrajectory::stationary(Point::new(1.0, 1.0), 0, 600, DeviceParams::IDEAL).unwrap();
        let p = simulate_profile(&env, &t, 5, 1).unwrap();
        assert_eq!(p.len(), 120);
        assert_eq!(p.vectors()[119].timestamp(), 595);
        assert_eq!(p, simulate_profile(&env, &t, 5, 1).unwrap());
    }

    #[test]
    fn single_waypoint_scans_once_in_place() {
        let env = one_ap_env(Point::new(0.0, 0.0), 2.0, 0.0);
        let t = SimTrajectory::new(vec![(100, Point::new(10.0, 0.0))], DeviceParams::IDEAL).unwrap();
        let p = simulate_profile(&env, &t, 5, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.vectors()[0].timestamp(), 100);
        assert_eq!(p.vectors()[0].iter().next().unwrap().1.dbm(), -60);
    }

    #[test]
    fn zero_separation_zero_noise_gives_identical_scans() {
        let env = one_ap_env(Point::new(4.0, 0.0), 2.5, 0.0);
        let setup = PairSpec {
            devices: (DeviceParams::IDEAL, DeviceParams::IDEAL),
            ..PairSpec::default()
        };
        let s = make_paired_scenario(&env, &setup).unwrap();
        assert_eq!(s.anchor_profile, s.other_profile);
        assert_eq!(s.distance, 0.0);
        assert!(make_paired_scenario(&env, &PairSpec { separation: -1.0, ..setup }).is_err());
    }
}
