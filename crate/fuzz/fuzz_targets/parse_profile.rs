#![no_main]

use libfuzzer_sys::fuzz_target;
use vcontact_core::parse_profile;

fuzz_target!(|data: &[u8]| {
    if let Ok(profile) = parse_profile(data) {
        // serialization is canonical: reparsing gives the same value and bytes
        let bytes = profile.to_bytes();
        let again = parse_profile(&bytes).expect("serialized profile must parse");
        assert_eq!(again, profile);
        assert_eq!(again.to_bytes(), bytes);
    }
});
