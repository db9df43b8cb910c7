#![no_main]

use libfuzzer_sys::fuzz_target;
use vcontact_exchange::SyncState;

fuzz_target!(|data: &[u8]| {
    if let Ok(state) = SyncState::decode(data) {
        assert_eq!(state.encode(), data);
    }
});
