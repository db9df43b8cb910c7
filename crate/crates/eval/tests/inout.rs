use vcontact_core::{build_area_profile, SignalProfile};
use vcontact_eval::{classify, run_in_out_simulation, run_in_out_study, simulate_in_out, Experiment};
use vcontact_oracles::{arb_scans, detect_oracle, to_profile, to_vector};
use vcontact_sim::SitePreset;
use proptest::prelude::*;

fn readings(pairs: &[(u8, i32)]) -> vcontact_oracles::Readings {
    pairs.iter().copied().collect()
}

fn area() -> vcontact_core::ProcessedProfile {
    let survey = to_profile(&[(0, readings(&[(1, -50), (2, -60)])), (10, readings(&[(1, -55), (3, -70)]))]);
    build_area_profile(&survey, 0, 10, 600, "a").unwrap()
}

#[test]
fn all_inside_detected_and_no_outside() {
    let inside = vec![to_vector(20, &readings(&[(1, -52), (2, -60)]))];
    let m = run_in_out_study(&area(), &inside, &[], 0.5);
    assert_eq!((m.precision, m.recall), (1.0, 1.0));
}

#[test]
fn disjoint_outside_scans_never_match() {
    let inside = vec![to_vector(20, &readings(&[(1, -52)]))];
    let outside: Vec<_> = (0..5).map(|i| to_vector(20 + i, &readings(&[(9, -40), (10, -80)]))).collect();
    assert!(classify(&area(), &outside, 0.01).iter().all(|f| !f));
    let m = run_in_out_study(&area(), &inside, &outside, 0.01);
    assert_eq!(m.precision, 1.0);
}

#[test]
fn expired_area_matches_nothing() {
    let late = vec![to_vector(10_000, &readings(&[(1, -52), (2, -60)]))];
    assert_eq!(classify(&area(), &late, 0.01), vec![false]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn classification_matches_oracle(survey in arb_scans(8, 5, 8, 20), scans in arb_scans(8, 5, 10, 40), a in 1u32..=100) {
        let survey = to_profile(&survey);
        prop_assume!(!survey.is_empty());
        let t0 = survey.vectors()[0].timestamp();
        let t1 = survey.vectors().last().unwrap().timestamp();
        let area = build_area_profile(&survey, t0, t1 + 1, 300, "a").unwrap();
        let alpha = f64::from(a) / 100.0;
        let user = to_profile(&scans);
        let got = classify(&area, user.vectors(), alpha);
        prop_assert_eq!(got, detect_oracle(&user, std::slice::from_ref(&area), alpha));
    }
}

#[test]
fn simulated_in_out_separates_inside_from_far_outside() {
    let e = Experiment::preset(SitePreset::Mall);
    let d = simulate_in_out(&e.site, &e.study, 1, 100, 10.0).unwrap();
    assert_eq!((d.inside.len(), d.outside.len()), (100, 100));
    let m = run_in_out_study(&d.area, &d.inside, &d.outside, e.study.alpha);
    assert!(m.recall > 0.5 && m.precision > 0.5, "{m:?}");
    let rows = run_in_out_simulation(&e.site, &e.study).unwrap();
    assert_eq!(rows.len(), e.study.seeds.len());
    let _: &SignalProfile = &d.survey;
}
