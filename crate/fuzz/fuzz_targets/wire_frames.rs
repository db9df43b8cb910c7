#![no_main]

use libfuzzer_sys::fuzz_target;
use vcontact_exchange::{decode_records, encode_records};

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = decode_records(data) {
        assert_eq!(encode_records(&records), data);
    }
});
