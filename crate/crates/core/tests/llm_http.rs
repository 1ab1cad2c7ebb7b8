mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use comptra::llm::{complete_chat, ChatRequest, HttpBackend, LlmError};
use serde_json::json;

fn ok_body(text: &str) -> String {
    json!({ "choices": [{ "message": { "role": "assistant", "content": text } }] }).to_string()
}

fn backend(url: &str) -> HttpBackend {
    HttpBackend::new(url, "test-model", Duration::from_secs(5)).unwrap().with_backoff_base(Duration::from_millis(1))
}

#[test]
fn sends_openai_compatible_body() {
    let server = common::serve(|_| (200, ok_body("ሰላም\n")));
    let out = complete_chat(&backend(&server.url), &ChatRequest::user("Translate this", 64)).unwrap();
    assert_eq!(out, "ሰላም");
    let req = &server.requests()[0];
    assert_eq!(req.path, "/chat/completions");
    let body = req.json();
    assert_eq!(body["model"], "test-model");
    assert_eq!(body["max_tokens"], 64);
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["messages"][0]["content"], "Translate this");
    assert!(req.header("authorization").is_none());
}

#[test]
fn bearer_token_is_sent() {
    let server = common::serve(|_| (200, ok_body("x")));
    complete_chat(&backend(&server.url).with_token("sekret"), &ChatRequest::user("p", 8)).unwrap();
    assert_eq!(server.requests()[0].header("authorization"), Some("Bearer sekret"));
}

#[test]
fn retries_server_errors_then_succeeds() {
    let hits = Arc::new(AtomicUsize::new(0));
    let h = hits.clone();
    let server =
        common::serve(
            move |_| {
                if h.fetch_add(1, Ordering::SeqCst) < 2 {
                    (503, "busy".into())
                } else {
                    (200, ok_body("done"))
                }
            },
        );
    let out = complete_chat(&backend(&server.url), &ChatRequest::user("p", 8)).unwrap();
    assert_eq!(out, "done");
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn gives_up_after_max_retries() {
    let server = common::serve(|_| (429, "slow down".into()));
    let err = complete_chat(&backend(&server.url).with_max_retries(2), &ChatRequest::user("p", 8)).unwrap_err();
    assert!(matches!(err, LlmError::Transport { status: Some(429), .. }));
    assert_eq!(server.requests().len(), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let server = common::serve(|_| (400, "bad".into()));
    let err = complete_chat(&backend(&server.url), &ChatRequest::user("p", 8)).unwrap_err();
    assert!(matches!(err, LlmError::Transport { status: Some(400), .. }));
    assert_eq!(server.requests().len(), 1);
}

#[test]
fn malformed_responses_are_reported() {
    let server = common::serve(|_| (200, json!({ "choices": [] }).to_string()));
    let err = complete_chat(&backend(&server.url), &ChatRequest::user("p", 8)).unwrap_err();
    assert!(matches!(err, LlmError::MalformedResponse(_)));

    let server = common::serve(|_| (200, "not json".into()));
    let err = complete_chat(&backend(&server.url), &ChatRequest::user("p", 8)).unwrap_err();
    assert!(matches!(err, LlmError::MalformedResponse(_)));
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    drop(listener);
    let err = complete_chat(&backend(&url).with_max_retries(0), &ChatRequest::user("p", 8)).unwrap_err();
    assert!(matches!(err, LlmError::Transport { status: None, .. }));
}
