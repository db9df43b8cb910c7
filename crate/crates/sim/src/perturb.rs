//! Profile perturbations for robustness experiments.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use vcontact_core::{Rssi, SignalId, SignalProfile, SignalVector};

use crate::error::SimError;
use crate::rng;

/// Removes `round(rate × distinct IDs)` IDs, chosen uniformly at random,
/// from every vector of the profile.
pub fn perturb_filter_aps(profile: &SignalProfile, rate: f64, seed: u64) -> Result<SignalProfile, SimError> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(SimError::invalid("rate", format!("{rate} outside [0, 1]")));
    }
    let ids: Vec<SignalId> = profile
        .vectors()
        .iter()
        .flat_map(|v| v.ids().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let remove = (rate * ids.len() as f64).round() as usize;
    let mut rng = rng::keyed(seed, rng::FILTER, 0, 0);
    let dropped: BTreeSet<SignalId> = sample(&mut rng, ids.len(), remove).into_iter().map(|i| ids[i]).collect();
    let vectors = profile
        .vectors()
        .iter()
        .map(|v| {
            let kept = v.iter().filter(|(id, _)| !dropped.contains(id)).map(|(id, r)| (*id, r)).collect();
            SignalVector::new(v.timestamp(), kept)
        })
        .collect();
    Ok(SignalProfile::new(vectors, profile.device_tag().map(str::to_string))?)
}

/// Adds `N(0, std)` dB to every reading, rounding to whole dBm and clamping
/// into `[-100, 0]`. Draws are keyed by (vector index, ID position).
pub fn perturb_rssi_noise(profile: &SignalProfile, std: f64, seed: u64) -> Result<SignalProfile, SimError> {
    if !(std >= 0.0 && std.is_finite()) {
        return Err(SimError::invalid("std", format!("{std} must be finite and >= 0")));
    }
    let vectors = profile
        .vectors()
        .iter()
        .enumerate()
        .map(|(vi, v)| {
            let noisy = v
                .iter()
                .enumerate()
                .map(|(ri, (id, r))| {
                    let noise: f64 = rng::keyed(seed, rng::NOISE, vi as u64, ri as u64).sample(StandardNormal);
                    (*id, Rssi::clamped((f64::from(r.dbm()) + noise * std).round() as i32))
                })
                .collect();
            SignalVector::new(v.timestamp(), noisy)
        })
        .collect();
    Ok(SignalProfile::new(vectors, profile.device_tag().map(str::to_string))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(aps: u8, scans: i64) -> SignalProfile {
        let vectors = (0..scans)
            .map(|t| {
                SignalVector::from_raw(t, (0..aps).map(|n| (SignalId::from_bytes([n; 32]), -30 - i32::from(n)))).unwrap()
            })
            .collect();
        SignalProfile::new(vectors, Some("dev".into())).unwrap()
    }

    fn distinct_ids(p: &SignalProfile) -> usize {
        p.vectors().iter().flat_map(|v| v.ids().copied()).collect::<BTreeSet<_>>().len()
    }

    #[test]
    fn filter_rate_zero_is_identity() {
        let p = profile(10, 5);
        assert_eq!(perturb_filter_aps(&p, 0.0, 3).unwrap(), p);
    }

    #[test]
    fn filter_rate_one_empties_vectors() {
        let p = perturb_filter_aps(&profile(10, 5), 1.0, 3).unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.vectors().iter().all(|v| v.is_empty()));
    }

    #[test]
    fn filter_half_of_forty() {
        let p = perturb_filter_aps(&profile(40, 6), 0.5, 11).unwrap();
        assert_eq!(distinct_ids(&p), 20);
        // the same IDs vanish from every vector
        assert!(p.vectors().iter().all(|v| v.len() == 20));
        assert_eq!(p, perturb_filter_aps(&profile(40, 6), 0.5, 11).unwrap());
        assert!(perturb_filter_aps(&profile(1, 1), 1.5, 0).is_err());
    }

    #[test]
    fn noise_zero_is_identity() {
        let p = profile(10, 5);
        assert_eq!(perturb_rssi_noise(&p, 0.0, 1).unwrap(), p);
    }

    #[test]
    fn noise_is_deterministic_and_clamped() {
        let p = profile(30, 20);
        let a = perturb_rssi_noise(&p, 40.0, 5).unwrap();
        assert_eq!(a, perturb_rssi_noise(&p, 40.0, 5).unwrap());
        assert_ne!(a, perturb_rssi_noise(&p, 40.0, 6).unwrap());
        assert!(a.vectors().iter().flat_map(|v| v.iter()).all(|(_, r)| (-100..=0).contains(&r.dbm())));
    }

    #[test]
    fn noise_mean_absolute_change_is_folded_normal() {
        // Readings sit mid-range so clamping never triggers.
        let vectors = (0..400)
            .map(|t| SignalVector::from_raw(t, (0..50u8).map(|n| (SignalId::from_bytes([n; 32]), -50))).unwrap())
            .collect();
        let p = SignalProfile::new(vectors, None).unwrap();
        let std = 5.0;
        let noisy = perturb_rssi_noise(&p, std, 77).unwrap();
        let total: i64 = noisy.vectors().iter().flat_map(|v| v.iter()).map(|(_, r)| i64::from((r.dbm() + 50).abs())).sum();
        let mean = total as f64 / 20_000.0;
        // E|X| = σ·sqrt(2/π); rounding to whole dB adds ~σ²+1/12 variance.
        let expected = (std * std + 1.0 / 12.0).sqrt() * (2.0 / std::f64::consts::PI).sqrt();
        assert!((mean - expected).abs() / expected < 0.03, "mean {mean} expected {expected}");
    }
}
