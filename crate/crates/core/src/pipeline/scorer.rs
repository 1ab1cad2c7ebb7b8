//! Reference-free quality scorers and candidate selection.

use std::collections::HashSet;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::retrieval::tokenize_retrieval;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ScorerError {
    #[error("quality scorer failed: {0}")]
    Failure(String),
    #[error("ensemble needs at least two candidates, got {0}")]
    TooFewCandidates(usize),
}

/// Scores a translation against its source; higher is better.
pub trait QualityScorer: Send + Sync {
    fn score(&self, source: &str, translation: &str) -> Result<f64, ScorerError>;
}

impl<F> QualityScorer for F
where
    F: Fn(&str, &str) -> Result<f64, ScorerError> + Send + Sync,
{
    fn score(&self, source: &str, translation: &str) -> Result<f64, ScorerError> {
        self(source, translation)
    }
}

/// Same score for everything; selection then always keeps the first candidate.
#[derive(Debug, Clone, Copy)]
pub struct ConstantScorer(pub f64);

impl QualityScorer for ConstantScorer {
    fn score(&self, _: &str, _: &str) -> Result<f64, ScorerError> {
        Ok(self.0)
    }
}

/// Jaccard overlap of lowercased token sets. Only meaningful for tests and
/// for targets that copy names and numbers from the source.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalOverlapScorer;

impl QualityScorer for LexicalOverlapScorer {
    fn score(&self, source: &str, translation: &str) -> Result<f64, ScorerError> {
        let a: HashSet<String> = tokenize_retrieval(source).into_iter().collect();
        let b: HashSet<String> = tokenize_retrieval(translation).into_iter().collect();
        let union = a.union(&b).count();
        Ok(if union == 0 { 0.0 } else { a.intersection(&b).count() as f64 / union as f64 })
    }
}

/// POSTs `{"source", "translation"}` and reads `{"score"}`.
pub struct HttpScorer {
    url: String,
    client: reqwest::blocking::Client,
}

impl HttpScorer {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Result<Self, ScorerError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ScorerError::Failure(e.to_string()))?;
        Ok(Self { url: url.into(), client })
    }
}

#[derive(Deserialize)]
struct ScoreReply {
    score: f64,
}

impl QualityScorer for HttpScorer {
    fn score(&self, source: &str, translation: &str) -> Result<f64, ScorerError> {
        let fail = |e: reqwest::Error| ScorerError::Failure(e.to_string());
        let reply: ScoreReply = self
            .client
            .post(&self.url)
            .json(&serde_json::json!({ "source": source, "translation": translation }))
            .send()
            .and_then(|r| r.error_for_status())
            .map_err(fail)?
            .json()
            .map_err(fail)?;
        Ok(reply.score)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub name: String,
    pub translation: String,
}

impl Candidate {
    pub fn new(name: impl Into<String>, translation: impl Into<String>) -> Self {
        Self { name: name.into(), translation: translation.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub chosen_name: String,
    pub chosen_index: usize,
    pub scores: Vec<f64>,
}

/// Highest-scoring candidate; on ties the earliest in the list wins.
pub fn ensemble_select(
    candidates: &[Candidate],
    source: &str,
    scorer: &dyn QualityScorer,
) -> Result<Selection, ScorerError> {
    if candidates.len() < 2 {
        return Err(ScorerError::TooFewCandidates(candidates.len()));
    }
    let scores = candidates.iter().map(|c| scorer.score(source, &c.translation)).collect::<Result<Vec<_>, _>>()?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(Selection { chosen_name: candidates[best].name.clone(), chosen_index: best, scores })
}
