#![no_main]

use libfuzzer_sys::fuzz_target;
use vcontact_sim::ScenarioConfig;

fuzz_target!(|text: &str| {
    if let Ok(cfg) = ScenarioConfig::parse(text) {
        let _ = cfg.site();
        let _ = cfg.build_environment();
    }
});
