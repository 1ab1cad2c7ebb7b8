//! Record/replay of chat exchanges as JSONL.
//!
//! Each line: `{"digest", "prompt", "max_new_tokens", "stop"?, "messages"?, "response"}`.
//! `messages` is only written for requests that are not a single user turn,
//! so that the digest can always be re-derived from the record.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{ChatBackend, ChatMessage, ChatRequest, LlmError, Role};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CassetteRecord {
    pub digest: String,
    pub prompt: String,
    pub max_new_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub messages: Option<Vec<ChatMessage>>,
    pub response: String,
}

impl CassetteRecord {
    pub fn new(request: &ChatRequest, response: String) -> Self {
        let single_user = request.messages.len() == 1 && request.messages[0].role == Role::User;
        Self {
            digest: request.digest(),
            prompt: request.prompt().to_string(),
            max_new_tokens: request.max_new_tokens,
            stop: request.stop.clone(),
            messages: (!single_user).then(|| request.messages.clone()),
            response,
        }
    }

    /// Rebuilds the request the record was made from.
    pub fn request(&self) -> ChatRequest {
        let mut req = match &self.messages {
            Some(messages) => {
                ChatRequest { messages: messages.clone(), max_new_tokens: self.max_new_tokens, stop: None }
            }
            None => ChatRequest::user(self.prompt.clone(), self.max_new_tokens),
        };
        req.stop = self.stop.clone();
        req
    }
}

fn read_records(path: &Path) -> Result<Vec<CassetteRecord>, LlmError> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| LlmError::Config(format!("cassette line {}: {e}", i + 1))))
        .collect()
}

/// Replays responses by request digest.
#[derive(Debug, Clone, Default)]
pub struct CassetteBackend {
    responses: HashMap<String, String>,
}

impl CassetteBackend {
    pub fn load(path: &Path) -> Result<Self, LlmError> {
        Ok(Self::from_records(read_records(path)?))
    }

    pub fn from_records(records: impl IntoIterator<Item = CassetteRecord>) -> Self {
        let mut responses = HashMap::new();
        for r in records {
            responses.entry(r.digest).or_insert(r.response);
        }
        Self { responses }
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl ChatBackend for CassetteBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let digest = request.digest();
        self.responses.get(&digest).cloned().ok_or(LlmError::CassetteMiss(digest))
    }
}

struct RecorderState {
    seen: HashMap<String, String>,
    out: BufWriter<File>,
}

/// Forwards to an inner backend and appends each new exchange to a cassette.
/// Repeated requests are answered from the recording and written once.
pub struct RecordingBackend<B> {
    inner: B,
    state: Mutex<RecorderState>,
}

impl<B: ChatBackend> RecordingBackend<B> {
    /// Opens (or creates) the cassette; existing records are kept and reused.
    pub fn open(inner: B, path: &Path) -> Result<Self, LlmError> {
        let seen = if path.exists() {
            read_records(path)?.into_iter().map(|r| (r.digest, r.response)).collect()
        } else {
            HashMap::new()
        };
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { inner, state: Mutex::new(RecorderState { seen, out: BufWriter::new(file) }) })
    }

    pub fn into_inner(self) -> B {
        self.inner
    }
}

impl<B: ChatBackend> ChatBackend for RecordingBackend<B> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let digest = request.digest();
        if let Some(hit) = self.state.lock().expect("recorder lock").seen.get(&digest) {
            return Ok(hit.clone());
        }
        let response = self.inner.complete(request)?;
        let mut state = self.state.lock().expect("recorder lock");
        if !state.seen.contains_key(&digest) {
            let line = serde_json::to_string(&CassetteRecord::new(request, response.clone()))
                .expect("record serialization cannot fail");
            writeln!(state.out, "{line}")?;
            state.out.flush()?;
            state.seen.insert(digest, response.clone());
        }
        Ok(response)
    }
}
