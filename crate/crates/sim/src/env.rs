//! Simulated radio environment: access points, propagation parameters and
//! device capabilities.

use vcontact_core::{hash_mac, SignalId};

use crate::error::SimError;

/// Position in meters on the site plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Deserialize, serde::Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Linear interpolation, `frac` in `[0, 1]`.
    pub fn lerp(&self, other: &Point, frac: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * frac, self.y + (other.y - self.y) * frac)
    }
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Rect { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        self.min.lerp(&self.max, 0.5)
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.min.x..=self.max.x).contains(&p.x) && (self.min.y..=self.max.y).contains(&p.y)
    }

    pub fn expand(&self, margin: f64) -> Rect {
        Rect::new(
            Point::new(self.min.x - margin, self.min.y - margin),
            Point::new(self.max.x + margin, self.max.y + margin),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AccessPoint {
    pub id: SignalId,
    pub position: Point,
    /// Received power at 1 m, dBm.
    pub tx_power: f64,
}

impl AccessPoint {
    /// An AP whose ID is the salted hash of a synthetic locally administered
    /// MAC derived from `index`.
    pub fn synthetic(index: u32, position: Point, tx_power: f64) -> Self {
        let b = index.to_be_bytes();
        let mac = format!("02:5A:{:02X}:{:02X}:{:02X}:{:02X}", b[0], b[1], b[2], b[3]);
        AccessPoint { id: hash_mac(&mac, SIM_SALT).expect("synthetic MAC is canonical"), position, tx_power }
    }
}

/// Salt used for synthetic AP MAC addresses.
pub const SIM_SALT: &[u8] = b"vcontact-sim";

#[derive(Clone, Debug, PartialEq)]
pub struct SimEnvironment {
    aps: Vec<AccessPoint>,
    path_loss_exponent: f64,
    shadowing_std: f64,
    detection_floor: i32,
    seed: u64,
}

impl SimEnvironment {
    pub const DEFAULT_PATH_LOSS_EXPONENT: f64 = 2.5;
    pub const DEFAULT_SHADOWING_STD: f64 = 3.0;
    pub const DEFAULT_DETECTION_FLOOR: i32 = -90;

    pub fn new(
        aps: Vec<AccessPoint>,
        path_loss_exponent: f64,
        shadowing_std: f64,
        detection_floor: i32,
        seed: u64,
    ) -> Result<Self, SimError> {
        if !(1.5..=6.0).contains(&path_loss_exponent) {
            return Err(SimError::invalid("path_loss_exponent", format!("{path_loss_exponent} outside [1.5, 6]")));
        }
        if !(shadowing_std >= 0.0 && shadowing_std.is_finite()) {
            return Err(SimError::invalid("shadowing_std", format!("{shadowing_std} must be finite and >= 0")));
        }
        if let Some(ap) = aps.iter().find(|ap| !ap.position.is_finite() || !ap.tx_power.is_finite()) {
            return Err(SimError::invalid("aps", format!("non-finite access point {}", ap.id)));
        }
        Ok(SimEnvironment { aps, path_loss_exponent, shadowing_std, detection_floor, seed })
    }

    pub fn aps(&self) -> &[AccessPoint] {
        &self.aps
    }

    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }

    pub fn shadowing_std(&self) -> f64 {
        self.shadowing_std
    }

    pub fn detection_floor(&self) -> i32 {
        self.detection_floor
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_shadowing_std(&self, std: f64) -> Result<Self, SimError> {
        Self::new(self.aps.clone(), self.path_loss_exponent, std, self.detection_floor, self.seed)
    }

    pub fn with_detection_floor(&self, floor: i32) -> Self {
        SimEnvironment { detection_floor: floor, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SimEnvironment { seed, ..self.clone() }
    }

    /// Noise-free received power from `ap` at `position`, before device bias.
    pub fn mean_rssi(&self, ap: &AccessPoint, position: &Point) -> f64 {
        let d = ap.position.distance(position).max(1.0);
        ap.tx_power - 10.0 * self.path_loss_exponent * d.log10()
    }
}

/// Receiver characteristics of one phone model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviceParams {
    /// Added to every reading, dB.
    pub bias: f64,
    /// Probability that an AP above the floor shows up in a scan.
    pub detect_rate: f64,
}

impl DeviceParams {
    pub fn new(bias: f64, detect_rate: f64) -> Result<Self, SimError> {
        if !(detect_rate > 0.0 && detect_rate <= 1.0) {
            return Err(SimError::invalid("detect_rate", format!("{detect_rate} outside (0, 1]")));
        }
        if !bias.is_finite() {
            return Err(SimError::invalid("bias", "must be finite"));
        }
        Ok(DeviceParams { bias, detect_rate })
    }

    /// Unbiased receiver that reports every AP above the floor.
    pub const IDEAL: DeviceParams = DeviceParams { bias: 0.0, detect_rate: 1.0 };
}

impl Default for DeviceParams {
    fn default() -> Self {
        DeviceParams { bias: 0.0, detect_rate: 0.95 }
    }
}

/// Waypoints with a receiving device.
#[derive(Clone, Debug, PartialEq)]
pub struct SimTrajectory {
    waypoints: Vec<(i64, Point)>,
    device: DeviceParams,
}

impl SimTrajectory {
    pub fn new(waypoints: Vec<(i64, Point)>, device: DeviceParams) -> Result<Self, SimError> {
        if waypoints.is_empty() {
            return Err(SimError::invalid("waypoints", "need at least one waypoint"));
        }
        if waypoints.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SimError::invalid("waypoints", "times must be strictly increasing"));
        }
        if waypoints.iter().any(|(_, p)| !p.is_finite()) {
            return Err(SimError::invalid("waypoints", "positions must be finite"));
        }
        Ok(SimTrajectory { waypoints, device })
    }

    /// Stays at `position` over `[start, start + duration)`.
    pub fn stationary(position: Point, start: i64, duration: i64, device: DeviceParams) -> Result<Self, SimError> {
        if duration <= 0 {
            return Err(SimError::invalid("duration", "must be positive"));
        }
        Self::new(vec![(start, position), (start + duration, position)], device)
    }

    pub fn waypoints(&self) -> &[(i64, Point)] {
        &self.waypoints
    }

    pub fn device(&self) -> DeviceParams {
        self.device
    }

    pub fn start(&self) -> i64 {
        self.waypoints[0].0
    }

    pub fn end(&self) -> i64 {
        self.waypoints[self.waypoints.len() - 1].0
    }

    /// Position at `t`, clamped to the first and last waypoints.
    pub fn position_at(&self, t: i64) -> Point {
        let wp = &self.waypoints;
        if t <= wp[0].0 {
            return wp[0].1;
        }
        let next = wp.partition_point(|(wt, _)| *wt <= t);
        if next >= wp.len() {
            return wp[wp.len() - 1].1;
        }
        let (t0, p0) = wp[next - 1];
        let (t1, p1) = wp[next];
        p0.lerp(&p1, (t - t0) as f64 / (t1 - t0) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_validation() {
        assert!(SimEnvironment::new(vec![], 1.4, 0.0, -90, 0).is_err());
        assert!(SimEnvironment::new(vec![], 6.1, 0.0, -90, 0).is_err());
        assert!(SimEnvironment::new(vec![], 2.0, -1.0, -90, 0).is_err());
        let bad = AccessPoint::synthetic(0, Point::new(f64::NAN, 0.0), -40.0);
        assert!(SimEnvironment::new(vec![bad], 2.0, 0.0, -90, 0).is_err());
        assert!(SimEnvironment::new(vec![], 2.0, 0.0, -90, 0).is_ok());
    }

    #[test]
    fn device_validation() {
        assert!(DeviceParams::new(0.0, 0.0).is_err());
        assert!(DeviceParams::new(0.0, 1.01).is_err());
        assert!(DeviceParams::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn synthetic_ids_are_distinct() {
        let a = AccessPoint::synthetic(1, Point::default(), -40.0);
        let b = AccessPoint::synthetic(256, Point::default(), -40.0);
        assert_ne!(a.id, b.id);
    }

    #[test]
    fn trajectory_interpolates() {
        let t = SimTrajectory::new(vec![(0, Point::new(0.0, 0.0)), (10, Point::new(10.0, 0.0))], DeviceParams::IDEAL).unwrap();
        assert_eq!(t.position_at(-5), Point::new(0.0, 0.0));
        assert_eq!(t.position_at(5), Point::new(5.0, 0.0));
        assert_eq!(t.position_at(50), Point::new(10.0, 0.0));
        assert!(SimTrajectory::new(vec![(0, Point::default()), (0, Point::default())], DeviceParams::IDEAL).is_err());
        assert!(SimTrajectory::new(vec![], DeviceParams::IDEAL).is_err());
    }
}
