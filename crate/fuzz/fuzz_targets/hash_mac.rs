#![no_main]

use libfuzzer_sys::fuzz_target;
use vcontact_core::{hash_mac, SignalId};

fuzz_target!(|input: (&str, &[u8])| {
    let (mac, salt) = input;
    let canonical = mac.len() == 17
        && mac.bytes().enumerate().all(|(i, b)| if i % 3 == 2 { b == b':' } else { b.is_ascii_digit() || (b'A'..=b'F').contains(&b) });
    let hashed = hash_mac(mac, salt);
    assert_eq!(hashed.is_ok(), canonical);
    if let Ok(id) = hashed {
        assert_eq!(hash_mac(mac, salt).ok(), Some(id));
        assert_eq!(SignalId::from_hex(&id.to_hex()).ok(), Some(id));
    }
});
