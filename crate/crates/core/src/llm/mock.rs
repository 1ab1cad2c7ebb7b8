use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ChatBackend, ChatRequest, LlmError};

/// One scripted reply: the first rule whose `contains` occurs in the prompt wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRule {
    pub contains: String,
    #[serde(default)]
    pub response: String,
    /// When set, the rule fails with a transport error carrying this cause.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// JSON rules file: `{"rules": [{"contains": .., "response": ..}], "default": ..}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default)]
    pub rules: Vec<MockRule>,
    #[serde(default)]
    pub default: Option<String>,
}

impl MockScript {
    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| LlmError::Config(format!("mock script: {e}")))
    }
}

type Responder = dyn Fn(&ChatRequest) -> Result<String, LlmError> + Send + Sync;

/// Deterministic test double.
#[derive(Clone)]
pub struct MockBackend {
    responder: Arc<Responder>,
}

impl MockBackend {
    pub fn from_script(script: MockScript) -> Self {
        Self::from_fn(move |req| {
            let prompt = req.prompt();
            match script.rules.iter().find(|r| prompt.contains(&r.contains)) {
                Some(MockRule { error: Some(cause), .. }) => {
                    Err(LlmError::Transport { status: None, cause: cause.clone() })
                }
                Some(rule) => Ok(rule.response.clone()),
                None => script.default.clone().ok_or_else(|| LlmError::CassetteMiss(req.digest())),
            }
        })
    }

    pub fn from_rules<I, P, R>(rules: I) -> Self
    where
        I: IntoIterator<Item = (P, R)>,
        P: Into<String>,
        R: Into<String>,
    {
        Self::from_script(MockScript {
            rules: rules
                .into_iter()
                .map(|(p, r)| MockRule { contains: p.into(), response: r.into(), error: None })
                .collect(),
            default: None,
        })
    }

    /// Answers every request with the same text.
    pub fn constant(text: impl Into<String>) -> Self {
        let text = text.into();
        Self::from_fn(move |_| Ok(text.clone()))
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&ChatRequest) -> Result<String, LlmError> + Send + Sync + 'static,
    {
        Self { responder: Arc::new(f) }
    }
}

impl ChatBackend for MockBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        (self.responder)(request)
    }
}
