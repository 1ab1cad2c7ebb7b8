//! Chat-completion access: live OpenAI-compatible HTTP, scripted mocks, and
//! record/replay cassettes. Decoding is always greedy.

mod cassette;
mod http;
mod limit;
mod mock;

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use cassette::{CassetteBackend, CassetteRecord, RecordingBackend};
pub use http::HttpBackend;
pub use limit::{CallCounter, ConcurrencyLimit, LimitedBackend};
pub use mock::{MockBackend, MockRule, MockScript};

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("transport error{}: {cause}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Transport { status: Option<u16>, cause: String },
    #[error("no cassette record for request {0}")]
    CassetteMiss(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("backend configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

/// A chat request. Temperature is not a field: every request is greedy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub messages: Vec<ChatMessage>,
    pub max_new_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<Vec<String>>,
}

impl ChatRequest {
    /// Single user message, the shape every pipeline prompt uses.
    pub fn user(prompt: impl Into<String>, max_new_tokens: u32) -> Self {
        Self { messages: vec![ChatMessage { role: Role::User, content: prompt.into() }], max_new_tokens, stop: None }
    }

    pub fn temperature(&self) -> f64 {
        0.0
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.max_new_tokens == 0 {
            return Err(LlmError::InvalidRequest("max_new_tokens must be positive".into()));
        }
        match self.messages.last() {
            Some(m) if m.role == Role::User => Ok(()),
            Some(_) => Err(LlmError::InvalidRequest("last message must come from the user".into())),
            None => Err(LlmError::InvalidRequest("no messages".into())),
        }
    }

    /// The text of the final user turn.
    pub fn prompt(&self) -> &str {
        self.messages.last().map(|m| m.content.as_str()).unwrap_or("")
    }

    /// Stable serialization: messages, max_new_tokens, stop, in that order.
    /// Endpoint and model never enter the digest.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("request serialization cannot fail")
    }

    /// SHA-256 hex of [`Self::canonical_json`].
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

/// Anything that can answer a chat request.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError>;
}

impl<T: ChatBackend + ?Sized> ChatBackend for Arc<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

impl<T: ChatBackend + ?Sized> ChatBackend for Box<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

/// Validates the request, then delegates to the backend.
pub fn complete_chat(backend: &dyn ChatBackend, request: &ChatRequest) -> Result<String, LlmError> {
    request.validate()?;
    backend.complete(request)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Http,
    Mock,
    Cassette,
}

impl std::str::FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "http" => Ok(BackendKind::Http),
            "mock" => Ok(BackendKind::Mock),
            "cassette" => Ok(BackendKind::Cassette),
            other => Err(format!("unknown backend {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub kind: BackendKind,
    #[serde(default)]
    pub endpoint_url: Option<String>,
    #[serde(default)]
    pub model_name: Option<String>,
    #[serde(default)]
    pub auth_env_var: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_concurrency")]
    pub max_concurrency: usize,
    /// Replay source for `cassette`, recording target for `http`.
    #[serde(default)]
    pub cassette_path: Option<PathBuf>,
    /// Rules file for `mock`.
    #[serde(default)]
    pub mock_script: Option<PathBuf>,
}

fn default_timeout() -> f64 {
    120.0
}
fn default_retries() -> u32 {
    3
}
fn default_concurrency() -> usize {
    8
}

impl BackendConfig {
    pub fn new(kind: BackendKind) -> Self {
        Self {
            kind,
            endpoint_url: None,
            model_name: None,
            auth_env_var: None,
            timeout_s: default_timeout(),
            max_retries: default_retries(),
            max_concurrency: default_concurrency(),
            cassette_path: None,
            mock_script: None,
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.kind == BackendKind::Http && (self.endpoint_url.is_none() || self.model_name.is_none()) {
            return Err(LlmError::Config("http backend needs endpoint_url and model_name".into()));
        }
        if self.kind == BackendKind::Cassette && self.cassette_path.is_none() {
            return Err(LlmError::Config("cassette backend needs a cassette path".into()));
        }
        if self.max_concurrency == 0 {
            return Err(LlmError::Config("max_concurrency must be at least 1".into()));
        }
        Ok(())
    }
}

/// Builds the configured backend, bounded to `max_concurrency` in-flight calls.
/// An http backend with a cassette path records every exchange to it.
pub fn build_backend(config: &BackendConfig) -> Result<Arc<dyn ChatBackend>, LlmError> {
    config.validate()?;
    let inner: Arc<dyn ChatBackend> = match config.kind {
        BackendKind::Http => {
            let http = HttpBackend::from_config(config)?;
            match &config.cassette_path {
                Some(path) => Arc::new(RecordingBackend::open(http, path)?),
                None => Arc::new(http),
            }
        }
        BackendKind::Mock => {
            let script = match &config.mock_script {
                Some(path) => MockScript::load(path)?,
                None => MockScript::default(),
            };
            Arc::new(MockBackend::from_script(script))
        }
        BackendKind::Cassette => {
            let path = config.cassette_path.as_ref().expect("validated");
            Arc::new(CassetteBackend::load(path)?)
        }
    };
    Ok(Arc::new(LimitedBackend::new(inner, config.max_concurrency)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_serialization_is_stable() {
        let mut r = ChatRequest::user("Translate this", 500);
        assert_eq!(
            r.canonical_json(),
            r#"{"messages":[{"role":"user","content":"Translate this"}],"max_new_tokens":500}"#
        );
        assert_eq!(r.digest(), r.clone().digest());
        assert_eq!(r.digest().len(), 64);
        let d = r.digest();
        r.stop = Some(vec!["\n\n".into()]);
        assert_ne!(d, r.digest());
    }

    #[test]
    fn request_validation() {
        assert!(ChatRequest::user("x", 0).validate().is_err());
        let mut r = ChatRequest::user("x", 5);
        r.messages.push(ChatMessage { role: Role::Assistant, content: "y".into() });
        assert!(r.validate().is_err());
        assert_eq!(ChatRequest::user("x", 5).temperature(), 0.0);
    }

    #[test]
    fn http_config_needs_endpoint_and_model() {
        let mut c = BackendConfig::new(BackendKind::Http);
        assert!(c.validate().is_err());
        c.endpoint_url = Some("http://localhost:1".into());
        c.model_name = Some("m".into());
        assert!(c.validate().is_ok());
    }
}
