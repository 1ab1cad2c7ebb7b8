use std::time::Duration;

use serde::Deserialize;

/// Dedicated MT service used as the phrase translator:
/// POST `{"text", "src", "tgt"}` → `{"translation"}`.
pub struct ExternalMt {
    url: String,
    client: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct MtReply {
    translation: String,
}

impl ExternalMt {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Result<Self, String> {
        let client = reqwest::blocking::Client::builder().timeout(timeout).build().map_err(|e| e.to_string())?;
        Ok(Self { url: url.into(), client })
    }

    pub fn translate(&self, text: &str, src: &str, tgt: &str) -> Result<String, String> {
        let reply: MtReply = self
            .client
            .post(&self.url)
            .json(&serde_json::json!({ "text": text, "src": src, "tgt": tgt }))
            .send()
            .and_then(|r| r.error_for_status())
            .map_err(|e| e.to_string())?
            .json()
            .map_err(|e| format!("malformed MT reply: {e}"))?;
        Ok(reply.translation)
    }
}
