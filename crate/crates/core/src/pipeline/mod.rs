//! Translation orchestration: zero-shot, few-shot, compositional
//! (decompose → translate phrases → merge) and ensemble modes, with a full
//! per-sentence trace.

mod corpus;
mod engine;
mod external;
mod scorer;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cleaning::PhrasePair;
use crate::decompose::{DecomposeError, DecompositionStrategy, PhraseSet, DEFAULT_DIVIDE_MAX_TOKENS};
use crate::lang::LanguageTag;
use crate::llm::LlmError;
use crate::prompts::PromptError;
use crate::retrieval::{RetrievalError, RetrieverKind, ScoredCandidate};

pub use corpus::{strip_timing, RunSummary};
pub use engine::{order_demonstrations, Pipeline, PipelineBuilder};
pub use external::ExternalMt;
pub use scorer::{
    ensemble_select, Candidate, ConstantScorer, HttpScorer, LexicalOverlapScorer, QualityScorer, ScorerError, Selection,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("sentence is empty")]
    EmptySentence,
    #[error("invalid pipeline configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error("external MT: {0}")]
    ExternalMt(String),
    #[error("writing trace: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineMode {
    ZeroShot,
    FewShot,
    Comptra,
    Ensemble,
}

impl PipelineMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PipelineMode::ZeroShot => "zero_shot",
            PipelineMode::FewShot => "few_shot",
            PipelineMode::Comptra => "comptra",
            PipelineMode::Ensemble => "ensemble",
        }
    }

    pub fn needs_retrieval(self) -> bool {
        self != PipelineMode::ZeroShot
    }
}

impl fmt::Display for PipelineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PipelineMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" | "zero_shot" => Ok(PipelineMode::ZeroShot),
            "few" | "few_shot" => Ok(PipelineMode::FewShot),
            "comptra" => Ok(PipelineMode::Comptra),
            "ensemble" => Ok(PipelineMode::Ensemble),
            other => Err(format!("unknown mode {other:?} (expected zero, few, comptra or ensemble)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhraseTranslator {
    LlmFewShot,
    ExternalMt,
}

impl FromStr for PhraseTranslator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "llm" | "llm_few_shot" => Ok(PhraseTranslator::LlmFewShot),
            "external_mt" | "mt" => Ok(PhraseTranslator::ExternalMt),
            other => Err(format!("unknown phrase translator {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub strategy: DecompositionStrategy,
    pub retriever: RetrieverKind,
    /// Demonstrations per prompt, for phrases and for few-shot sentences.
    pub k: usize,
    pub translate_max_tokens: u32,
    pub merge_max_tokens: u32,
    pub divide_max_tokens: u32,
    pub phrase_translator: PhraseTranslator,
    pub external_mt_endpoint: Option<String>,
    pub external_mt_timeout_s: f64,
    /// Bound on concurrent sentences, phrases and in-flight LLM calls.
    pub parallelism: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            strategy: DecompositionStrategy::default(),
            retriever: RetrieverKind::Bm25,
            k: 5,
            translate_max_tokens: 500,
            merge_max_tokens: 2000,
            divide_max_tokens: DEFAULT_DIVIDE_MAX_TOKENS,
            phrase_translator: PhraseTranslator::LlmFewShot,
            external_mt_endpoint: None,
            external_mt_timeout_s: 60.0,
            parallelism: 1,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.into()));
        if self.parallelism == 0 {
            return bad("parallelism must be at least 1");
        }
        if self.translate_max_tokens == 0 || self.merge_max_tokens == 0 || self.divide_max_tokens == 0 {
            return bad("token budgets must be positive");
        }
        if self.strategy.repeat_count == 0 {
            return bad("repeat_count must be at least 1");
        }
        if self.phrase_translator == PhraseTranslator::ExternalMt && self.external_mt_endpoint.is_none() {
            return bad("external_mt phrase translator needs external_mt_endpoint");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Languages {
    pub src: LanguageTag,
    pub tgt: LanguageTag,
}

/// Degradations taken to keep a sentence translatable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// The divide call produced no list; the sentence became its only phrase.
    DecompositionFailed,
    /// Every phrase translation was filtered out; zero-shot was used instead.
    NoKeptPairs,
    /// Retrieval returned nothing; zero-shot was used instead of few-shot.
    NoDemonstrations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhraseTrace {
    pub phrase: String,
    pub demo_ids: Vec<usize>,
    pub demo_scores: Vec<f64>,
    pub raw_translation: String,
    pub pair: PhrasePair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateTrace {
    pub name: String,
    pub translation: String,
    pub score: f64,
}

/// One line of the trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub sentence_id: usize,
    pub source: String,
    pub mode: PipelineMode,
    pub phrase_set: Option<PhraseSet>,
    pub per_phrase: Vec<PhraseTrace>,
    /// Sentence-level demonstrations (few-shot), best first.
    pub demos: Vec<ScoredCandidate>,
    pub k_effective: usize,
    /// Digest of the request that produced `raw_output` in compositional mode.
    pub merge_prompt_digest: Option<String>,
    pub candidates: Option<Vec<CandidateTrace>>,
    pub chosen: Option<String>,
    pub raw_output: String,
    #[serde(rename = "final")]
    pub final_text: String,
    pub fallbacks: Vec<Fallback>,
    pub warnings: Vec<String>,
    pub llm_calls: usize,
    pub error: Option<String>,
    pub wall_time_ms: u64,
}

impl TranslationRecord {
    pub(crate) fn new(sentence_id: usize, source: &str, mode: PipelineMode) -> Self {
        Self {
            sentence_id,
            source: source.to_string(),
            mode,
            phrase_set: None,
            per_phrase: Vec::new(),
            demos: Vec::new(),
            k_effective: 0,
            merge_prompt_digest: None,
            candidates: None,
            chosen: None,
            raw_output: String::new(),
            final_text: String::new(),
            fallbacks: Vec::new(),
            warnings: Vec::new(),
            llm_calls: 0,
            error: None,
            wall_time_ms: 0,
        }
    }
}
