mod common;

use std::io::{Read, Write};
use std::net::TcpListener;
use std::time::Duration;

use common::stay;
use vcontact_core::{serialize_signal_profile, DetectionConfig};
use vcontact_exchange::{client_sync, HttpTransport, RetryPolicy, SyncConfig};

/// Answers one request with an empty record list and returns what the
/// client sent.
fn capture_one(listener: TcpListener) -> Vec<u8> {
    let (mut conn, _) = listener.accept().unwrap();
    conn.set_read_timeout(Some(Duration::from_millis(500))).unwrap();
    let mut seen = Vec::new();
    let mut buf = [0u8; 4096];
    while !seen.windows(4).any(|w| w == b"\r\n\r\n") {
        match conn.read(&mut buf) {
            Ok(0) | Err(_) => break,
            Ok(n) => seen.extend_from_slice(&buf[..n]),
        }
    }
    while let Ok(n) = conn.read(&mut buf) {
        if n == 0 {
            break;
        }
        seen.extend_from_slice(&buf[..n]);
    }
    conn.write_all(b"HTTP/1.1 200 OK\r\ncontent-length: 0\r\nconnection: close\r\n\r\n").unwrap();
    seen
}

#[test]
fn sync_sends_only_the_cursor() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let capture = std::thread::spawn(move || capture_one(listener));

    let user = stay(0, 10, 0);
    let cfg = SyncConfig { detection: DetectionConfig::new(0.5).unwrap(), retry: RetryPolicy { attempts: 1, ..RetryPolicy::default() } };
    let dir = tempfile::tempdir().unwrap();
    let t = HttpTransport::new(&format!("http://{addr}")).unwrap();
    client_sync(dir.path(), &t, &user, &cfg).unwrap();

    let wire = String::from_utf8(capture.join().unwrap()).unwrap();
    let (head, body) = wire.split_once("\r\n\r\n").unwrap();
    assert!(body.is_empty());
    let mut lines = head.lines();
    assert_eq!(lines.next(), Some("GET /v1/profiles?since=0 HTTP/1.1"));
    for line in lines {
        let name = line.split(':').next().unwrap().to_ascii_lowercase();
        assert!(["host", "accept"].contains(&name.as_str()), "unexpected header {line:?}");
    }
    let serialized = serialize_signal_profile(&user);
    for v in user.vectors() {
        for id in v.ids() {
            assert!(!wire.contains(&id.to_hex()));
        }
    }
    assert!(!wire.contains(serialized.lines().nth(1).unwrap()));
}
