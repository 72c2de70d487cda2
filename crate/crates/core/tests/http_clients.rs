//! Remote clients against a one-shot local HTTP server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::mpsc;
use std::thread;

use meso_core::coverage::{EmbedError, Embedder, Embedding, HttpEmbedder};
use meso_core::extraction::{ClientError, CompletionClient, HttpCompletionClient};
use meso_core::http::{EndpointConfig, HttpError};
use serde_json::Value;

struct Captured {
    headers: Vec<String>,
    body: Value,
}

/// Serves `responses` in order, one connection each, and reports what it
/// received.
fn serve(responses: Vec<(u16, String)>) -> (String, mpsc::Receiver<Captured>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/endpoint", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for (status, body) in responses {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut headers = Vec::new();
            let mut len = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end().to_string();
                if line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                headers.push(line);
            }
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            tx.send(Captured {
                headers,
                body: serde_json::from_slice(&buf).unwrap(),
            })
            .unwrap();
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    (url, rx)
}

fn config(url: String, token_env: Option<&str>) -> EndpointConfig {
    EndpointConfig {
        endpoint: url,
        model: "test-model".into(),
        token_env: token_env.map(str::to_string),
        timeout_secs: 5,
    }
}

#[test]
fn completion_round_trip_with_bearer_token() {
    std::env::set_var("MESO_TEST_LLM_TOKEN", "sekret");
    let reply = r#"{"choices":[{"message":{"role":"assistant","content":"{\"ok\":true}"}}]}"#;
    let (url, rx) = serve(vec![(200, reply.into())]);
    let client = HttpCompletionClient::new(config(url, Some("MESO_TEST_LLM_TOKEN"))).unwrap();
    assert_eq!(client.model_id(), "test-model");
    assert_eq!(client.complete("hello").unwrap(), "{\"ok\":true}");
    let got = rx.recv().unwrap();
    assert!(got
        .headers
        .iter()
        .any(|h| h.eq_ignore_ascii_case("authorization: Bearer sekret")));
    assert_eq!(got.body["model"], "test-model");
    assert_eq!(got.body["messages"][0]["content"], "hello");
}

#[test]
fn completion_errors_are_reported() {
    let (url, _rx) = serve(vec![(500, "{}".into()), (200, r#"{"choices":[]}"#.into())]);
    let client = HttpCompletionClient::new(config(url, None)).unwrap();
    assert!(matches!(
        client.complete("x"),
        Err(ClientError::Http(HttpError::Transport(_)))
    ));
    assert!(matches!(
        client.complete("x"),
        Err(ClientError::Http(HttpError::Response(_)))
    ));
}

#[test]
fn embedding_round_trip_and_dimension_drift() {
    let (url, rx) = serve(vec![
        (200, r#"{"data":[{"embedding":[0.5, -0.25, 1.0]}]}"#.into()),
        (200, r#"{"data":[{"embedding":[1.0, 2.0]}]}"#.into()),
    ]);
    let e = HttpEmbedder::new(config(url, None)).unwrap();
    let v: Embedding<f64> = e.embed("work stress").unwrap();
    assert_eq!(v.values(), [0.5, -0.25, 1.0]);
    assert_eq!(rx.recv().unwrap().body["input"], "work stress");
    let drift: Result<Embedding<f64>, _> = e.embed("again");
    assert!(matches!(
        drift,
        Err(EmbedError::DimensionDrift {
            expected: 3,
            found: 2
        })
    ));
}
