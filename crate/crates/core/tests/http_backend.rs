//! Wire-contract tests for the HTTP backend against a loopback server:
//! request body shape, bearer credential, configurable reply field,
//! status and timeout mapping.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::thread::JoinHandle;
use std::time::Duration;

use audit5s::client::{
    Backend, BackendError, BackendProfile, BackendRequest, ClientConfig, HttpBackend, MediaType,
};

/// Accept one connection, capture the request, reply with `response`.
fn serve_once(response: &'static str, delay: Option<Duration>) -> (SocketAddr, JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = std::thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let request = read_request(&mut stream);
        if let Some(d) = delay {
            std::thread::sleep(d);
        }
        let _ = stream.write_all(response.as_bytes());
        request
    });
    (addr, handle)
}

fn read_request(stream: &mut TcpStream) -> String {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    loop {
        let n = stream.read(&mut chunk).unwrap();
        buf.extend_from_slice(&chunk[..n]);
        if n == 0 {
            break;
        }
        if let Some(header_end) = find_header_end(&buf) {
            let headers = String::from_utf8_lossy(&buf[..header_end]).to_lowercase();
            let content_length = headers
                .lines()
                .find_map(|l| l.strip_prefix("content-length:"))
                .and_then(|v| v.trim().parse::<usize>().ok())
                .unwrap_or(0);
            if buf.len() >= header_end + 4 + content_length {
                break;
            }
        }
    }
    String::from_utf8_lossy(&buf).to_string()
}

fn find_header_end(buf: &[u8]) -> Option<usize> {
    buf.windows(4).position(|w| w == b"\r\n\r\n")
}

fn config_for(addr: SocketAddr, credential_var: &str) -> ClientConfig {
    ClientConfig {
        endpoint: format!("http://{addr}/evaluate"),
        credential_var: credential_var.to_string(),
        request_timeout: Duration::from_secs(5),
        ..ClientConfig::default()
    }
}

fn sample_request() -> BackendRequest {
    BackendRequest {
        prompt_text: "You are a 5S audit specialist".to_string(),
        image_payload: "aGVsbG8=".to_string(),
        image_media_type: MediaType::Jpeg,
    }
}

const OK_REPLY: &str = "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: 33\r\nconnection: close\r\n\r\n{\"text\":\"UTILIZACAO: 4 SAUDE: 3\"}";

#[test]
fn posts_json_body_with_bearer_credential() {
    let var = "AUDIT5S_HTTP_TEST_KEY_A";
    std::env::set_var(var, "secret-token-1");
    let (addr, handle) = serve_once(OK_REPLY, None);

    let backend =
        HttpBackend::from_config(&config_for(addr, var), BackendProfile::default()).unwrap();
    let text = backend.send(&sample_request()).unwrap();
    assert_eq!(text, "UTILIZACAO: 4 SAUDE: 3");

    let raw = handle.join().unwrap();
    assert!(raw.starts_with("POST /evaluate"), "{raw}");
    assert!(
        raw.to_lowercase()
            .contains("authorization: bearer secret-token-1"),
        "{raw}"
    );
    let body_start = raw.find("\r\n\r\n").unwrap() + 4;
    let body: serde_json::Value = serde_json::from_str(&raw[body_start..]).unwrap();
    assert_eq!(body["prompt"], "You are a 5S audit specialist");
    assert_eq!(body["image"], "aGVsbG8=");
    assert_eq!(body["media_type"], "image/jpeg");
}

#[test]
fn profile_renames_fields_and_reply_path() {
    let var = "AUDIT5S_HTTP_TEST_KEY_B";
    std::env::set_var(var, "k");
    const NESTED: &str = "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: 46\r\nconnection: close\r\n\r\n{\"choices\":{\"message\":{\"content\":\"SAUDE 5\"}}}\n";
    let (addr, handle) = serve_once(NESTED, None);

    let profile = BackendProfile {
        prompt_field: "instructions".to_string(),
        image_field: "image_b64".to_string(),
        media_type_field: "mime".to_string(),
        reply_field: "choices.message.content".to_string(),
        backend_name: "custom".to_string(),
    };
    let backend = HttpBackend::from_config(&config_for(addr, var), profile).unwrap();
    assert_eq!(backend.name(), "custom");
    let text = backend.send(&sample_request()).unwrap();
    assert_eq!(text, "SAUDE 5");

    let raw = handle.join().unwrap();
    let body_start = raw.find("\r\n\r\n").unwrap() + 4;
    let body: serde_json::Value = serde_json::from_str(&raw[body_start..]).unwrap();
    assert_eq!(body["instructions"], "You are a 5S audit specialist");
    assert_eq!(body["image_b64"], "aGVsbG8=");
    assert_eq!(body["mime"], "image/jpeg");
}

#[test]
fn non_success_status_maps_to_status_error() {
    let var = "AUDIT5S_HTTP_TEST_KEY_C";
    std::env::set_var(var, "k");
    const FAIL: &str = "HTTP/1.1 503 Service Unavailable\r\ncontent-length: 9\r\nconnection: close\r\n\r\noverload!";
    let (addr, _handle) = serve_once(FAIL, None);
    let backend =
        HttpBackend::from_config(&config_for(addr, var), BackendProfile::default()).unwrap();
    match backend.send(&sample_request()) {
        Err(BackendError::Status { code, body }) => {
            assert_eq!(code, 503);
            assert_eq!(body, "overload!");
        }
        other => panic!("expected status error, got {other:?}"),
    }
}

#[test]
fn missing_reply_field_is_a_protocol_error() {
    let var = "AUDIT5S_HTTP_TEST_KEY_D";
    std::env::set_var(var, "k");
    const WRONG: &str = "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: 17\r\nconnection: close\r\n\r\n{\"output\":\"hi\"}\r\n";
    let (addr, _handle) = serve_once(WRONG, None);
    let backend =
        HttpBackend::from_config(&config_for(addr, var), BackendProfile::default()).unwrap();
    match backend.send(&sample_request()) {
        Err(BackendError::Protocol(reason)) => assert!(reason.contains("text"), "{reason}"),
        other => panic!("expected protocol error, got {other:?}"),
    }
}

#[test]
fn slow_reply_maps_to_timeout() {
    let var = "AUDIT5S_HTTP_TEST_KEY_E";
    std::env::set_var(var, "k");
    let (addr, _handle) = serve_once(OK_REPLY, Some(Duration::from_millis(1500)));
    let mut config = config_for(addr, var);
    config.request_timeout = Duration::from_millis(100);
    let backend = HttpBackend::from_config(&config, BackendProfile::default()).unwrap();
    match backend.send(&sample_request()) {
        Err(BackendError::Timeout) => {}
        other => panic!("expected timeout, got {other:?}"),
    }
}

#[test]
fn missing_credential_is_a_preflight_config_error() {
    let var = "AUDIT5S_HTTP_TEST_KEY_UNSET";
    std::env::remove_var(var);
    let config = ClientConfig {
        endpoint: "http://127.0.0.1:9/evaluate".to_string(),
        credential_var: var.to_string(),
        ..ClientConfig::default()
    };
    let err = match HttpBackend::from_config(&config, BackendProfile::default()) {
        Err(e) => e,
        Ok(_) => panic!("missing credential must fail pre-flight"),
    };
    assert!(err.to_string().contains(var), "{err}");

    let empty_endpoint = ClientConfig::default();
    assert!(HttpBackend::from_config(&empty_endpoint, BackendProfile::default()).is_err());
}

#[test]
fn refused_connection_is_a_connectivity_error() {
    let var = "AUDIT5S_HTTP_TEST_KEY_F";
    std::env::set_var(var, "k");
    // bind then drop to get a port that refuses connections
    let port = {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        listener.local_addr().unwrap().port()
    };
    let config = ClientConfig {
        endpoint: format!("http://127.0.0.1:{port}/evaluate"),
        credential_var: var.to_string(),
        request_timeout: Duration::from_secs(2),
        ..ClientConfig::default()
    };
    let backend = HttpBackend::from_config(&config, BackendProfile::default()).unwrap();
    match backend.send(&sample_request()) {
        Err(BackendError::Connectivity(_)) => {}
        other => panic!("expected connectivity error, got {other:?}"),
    }
}
