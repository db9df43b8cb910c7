#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::Arc;

use vcontact_core::{
    build_case_profile, hash_mac, serialize_processed_profile, LifespanSchedule, SignalProfile, SignalVector,
};
use vcontact_exchange::{AppState, Store};

pub struct Server {
    pub endpoint: String,
    pub addr: SocketAddr,
    _runtime: tokio::runtime::Runtime,
}

pub fn spawn(state: AppState) -> Server {
    let runtime = tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().unwrap();
    let listener = runtime.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let addr = listener.local_addr().unwrap();
    runtime.spawn(vcontact_exchange::serve(listener, state));
    Server { endpoint: format!("http://{addr}"), addr, _runtime: runtime }
}

pub fn spawn_store(store: Arc<Store>) -> Server {
    spawn(AppState::new(store, None))
}

pub fn scan(t: i64, readings: &[(&str, i32)]) -> SignalVector {
    SignalVector::from_raw(t, readings.iter().map(|(mac, r)| (hash_mac(mac, b"test").unwrap(), *r))).unwrap()
}

const MACS: [&str; 5] = ["02:00:00:00:00:01", "02:00:00:00:00:02", "02:00:00:00:00:03", "02:00:00:00:00:04", "02:00:00:00:00:05"];

/// Scans every 60 s over `[start, start + minutes * 60)` at a fixed spot.
pub fn stay(start: i64, minutes: i64, offset: i32) -> SignalProfile {
    let vectors = (0..minutes)
        .map(|i| scan(start + 60 * i, &MACS.iter().enumerate().map(|(k, m)| (*m, -45 - 5 * k as i32 + offset)).collect::<Vec<_>>()))
        .collect();
    SignalProfile::new(vectors, None).unwrap()
}

/// A processed profile file for a case staying `minutes` from `start`.
pub fn case_bytes(start: i64, minutes: i64, label: &str) -> Vec<u8> {
    let p = build_case_profile(&stay(start, minutes, 0), &LifespanSchedule::uniform(1800), label).unwrap();
    serialize_processed_profile(&p).into_bytes()
}
