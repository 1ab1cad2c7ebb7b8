use std::thread;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use super::{BackendConfig, ChatBackend, ChatMessage, ChatRequest, LlmError};

#[derive(Serialize)]
struct ChatCompletionBody<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    max_tokens: u32,
    temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stop: Option<&'a [String]>,
}

/// OpenAI-compatible `POST {endpoint}/chat/completions` client.
///
/// Retries 429, 5xx, timeouts and connection failures with exponential
/// backoff (1s, 2s, 4s, ...) up to `max_retries` extra attempts.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    url: String,
    model: String,
    token: Option<String>,
    max_retries: u32,
    backoff_base: Duration,
}

impl HttpBackend {
    pub fn new(endpoint_url: &str, model: &str, timeout: Duration) -> Result<Self, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        Ok(Self {
            client,
            url: format!("{}/chat/completions", endpoint_url.trim_end_matches('/')),
            model: model.to_string(),
            token: None,
            max_retries: 3,
            backoff_base: Duration::from_secs(1),
        })
    }

    pub fn from_config(config: &BackendConfig) -> Result<Self, LlmError> {
        let (Some(url), Some(model)) = (&config.endpoint_url, &config.model_name) else {
            return Err(LlmError::Config("http backend needs endpoint_url and model_name".into()));
        };
        let mut backend = Self::new(url, model, Duration::from_secs_f64(config.timeout_s))?;
        backend.max_retries = config.max_retries;
        backend.token = config.auth_env_var.as_deref().and_then(|var| std::env::var(var).ok());
        Ok(backend)
    }

    pub fn with_token(mut self, token: impl Into<String>) -> Self {
        self.token = Some(token.into());
        self
    }

    pub fn with_max_retries(mut self, retries: u32) -> Self {
        self.max_retries = retries;
        self
    }

    /// First retry delay; doubled for each further retry.
    pub fn with_backoff_base(mut self, base: Duration) -> Self {
        self.backoff_base = base;
        self
    }

    fn attempt(&self, request: &ChatRequest) -> Result<String, Attempt> {
        let body = ChatCompletionBody {
            model: &self.model,
            messages: &request.messages,
            max_tokens: request.max_new_tokens,
            temperature: request.temperature(),
            stop: request.stop.as_deref(),
        };
        let mut builder = self.client.post(&self.url).json(&body);
        if let Some(token) = &self.token {
            builder = builder.bearer_auth(token);
        }
        let response = builder.send().map_err(|e| {
            let err = LlmError::Transport { status: None, cause: e.to_string() };
            if e.is_timeout() || e.is_connect() || e.is_request() {
                Attempt::Retry(err)
            } else {
                Attempt::Fatal(err)
            }
        })?;
        let status = response.status();
        if !status.is_success() {
            let cause = response.text().unwrap_or_default();
            let err = LlmError::Transport { status: Some(status.as_u16()), cause };
            return Err(if status.as_u16() == 429 || status.is_server_error() {
                Attempt::Retry(err)
            } else {
                Attempt::Fatal(err)
            });
        }
        let json: Value = response.json().map_err(|e| Attempt::Fatal(LlmError::MalformedResponse(e.to_string())))?;
        let content = json
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| Attempt::Fatal(LlmError::MalformedResponse("missing choices[0].message.content".into())))?;
        Ok(content.strip_suffix('\n').unwrap_or(content).to_string())
    }
}

enum Attempt {
    Retry(LlmError),
    Fatal(LlmError),
}

impl ChatBackend for HttpBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let mut delay = self.backoff_base;
        let mut retries = 0;
        loop {
            match self.attempt(request) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(e)) => {
                    if retries >= self.max_retries {
                        return Err(e);
                    }
                    log::warn!("retrying chat completion in {delay:?}: {e}");
                    thread::sleep(delay);
                    delay *= 2;
                    retries += 1;
                }
            }
        }
    }
}
