//! In-out detection of an infected area: is a scan taken inside the
//! surveyed area?

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vcontact_core::{best_match, build_area_profile, ProcessedProfile, SignalProfile, SignalVector};
use vcontact_sim::{derive_seed, sample_scan, simulate_profile, Point, Rect, ScanKey, SimTrajectory, Site};

use crate::config::StudyConfig;
use crate::error::EvalError;
use crate::metrics::Prf;
use crate::proximity::device;

/// Flags each scan whose best similarity against the area's active
/// segments reaches `alpha`.
pub fn classify(area: &ProcessedProfile, scans: &[SignalVector], alpha: f64) -> Vec<bool> {
    let published = std::slice::from_ref(area);
    scans.iter().map(|v| best_match(v, published).is_some_and(|(s, _, _)| s >= alpha)).collect()
}

/// Precision and recall of the "inside" class.
pub fn run_in_out_study(area: &ProcessedProfile, inside: &[SignalVector], outside: &[SignalVector], alpha: f64) -> Prf {
    let tp = classify(area, inside, alpha).into_iter().filter(|&b| b).count();
    let fp = classify(area, outside, alpha).into_iter().filter(|&b| b).count();
    Prf::from_counts(tp, inside.len(), tp + fp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InOutData {
    pub survey: SignalProfile,
    pub area: ProcessedProfile,
    pub inside: Vec<SignalVector>,
    pub outside: Vec<SignalVector>,
}

/// Boustrophedon walk over `area`, rows `spacing` apart, one meter per
/// `pace` seconds.
pub fn survey_path(area: Rect, spacing: f64, start: i64, pace: i64) -> Vec<(i64, Point)> {
    let rows = ((area.height() / spacing).floor() as usize).max(1);
    let mut points = Vec::new();
    for r in 0..=rows {
        let y = area.min.y + area.height() * r as f64 / rows as f64;
        let (a, b) = (Point::new(area.min.x, y), Point::new(area.max.x, y));
        if r % 2 == 0 {
            points.extend([a, b]);
        } else {
            points.extend([b, a]);
        }
    }
    let mut t = start;
    let mut out = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            t += ((points[i - 1].distance(p) * pace as f64).ceil() as i64).max(1);
        }
        out.push((t, *p));
    }
    out
}

/// Surveys the site area, then scatters users inside it and in a band
/// `outside_gap..outside_gap + 20` meters beyond its edge. User scans are
/// taken after the survey, inside the lifespan window.
pub fn simulate_in_out(site: &Site, cfg: &StudyConfig, seed: u64, users: usize, outside_gap: f64) -> Result<InOutData, EvalError> {
    let dev = device(&cfg.case_device)?;
    let path = survey_path(site.area, 2.0, cfg.start, 1);
    let traj = SimTrajectory::new(path, dev)?;
    let survey = simulate_profile(&site.env, &traj, cfg.sampling_period, derive_seed(seed, 0))?;
    let stay_end = traj.end();
    let area = build_area_profile(&survey, traj.start(), stay_end, cfg.lifespan, "area")?;

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x1A));
    let user_dev = device(&cfg.user_device)?;
    let t = stay_end + 1;
    let mut inside = Vec::with_capacity(users);
    let mut outside = Vec::with_capacity(users);
    let a = site.area;
    for j in 0..users as u64 {
        let p = Point::new(rng.random_range(a.min.x..=a.max.x), rng.random_range(a.min.y..=a.max.y));
        inside.push(sample_scan(&site.env, p, user_dev, ScanKey { seed: derive_seed(seed, 0x100 + j), scan_index: 0 }, t));
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let gap = outside_gap + rng.random_range(0.0..20.0);
        let c = a.center();
        let reach = ((a.width() / 2.0 + gap) / theta.cos().abs()).min((a.height() / 2.0 + gap) / theta.sin().abs());
        let q = Point::new(c.x + (reach + 0.01) * theta.cos(), c.y + (reach + 0.01) * theta.sin());
        outside.push(sample_scan(&site.env, q, user_dev, ScanKey { seed: derive_seed(seed, 0x200 + j), scan_index: 0 }, t));
    }
    Ok(InOutData { survey, area, inside, outside })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InOutRow {
    pub seed: u64,
    pub alpha: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn run_in_out_simulation(site: &Site, cfg: &StudyConfig) -> Result<Vec<InOutRow>, EvalError> {
    cfg.seeds
        .iter()
        .map(|&seed| {
            let d = simulate_in_out(site, cfg, seed, 200, 10.0)?;
            let m = run_in_out_study(&d.area, &d.inside, &d.outside, cfg.alpha);
            Ok(InOutRow { seed, alpha: cfg.alpha, precision: m.precision, recall: m.recall, f1: m.f1 })
        })
        .collect()
}
