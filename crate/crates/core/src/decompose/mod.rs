//! Sentence decomposition: LLM propositions, content words, repetition,
//! LLM paraphrases and dependency-structure splitting.

mod structure;
mod words;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::DependencyTree;
use crate::llm::{complete_chat, ChatBackend, ChatRequest, LlmError};
use crate::prompts::{parse_propositions, DivideMode, PromptSet, DEFAULT_PHRASE_CAP};

pub use structure::{local_root, structure_split, Segment, DEFAULT_MAX_WORDS};
pub use words::{content_words, StopWords};

pub const DEFAULT_REPEAT_COUNT: usize = 4;
pub const DEFAULT_DIVIDE_MAX_TOKENS: u32 = 500;
/// Fewer paraphrases than this are accepted with a warning.
pub const EXPECTED_PARAPHRASES: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum DecomposeError {
    #[error("sentence is empty")]
    EmptySentence,
    #[error("no dependency tree for sentence {0}")]
    MissingTree(usize),
    #[error("strategy {0} needs an LLM backend")]
    MissingBackend(StrategyKind),
    #[error("repeat count must be at least 1")]
    InvalidRepeatCount,
    #[error(transparent)]
    Llm(#[from] LlmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    LlmPropositions,
    Words,
    Repeat,
    Paraphrase,
    Structure,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::LlmPropositions => "llm_propositions",
            StrategyKind::Words => "words",
            StrategyKind::Repeat => "repeat",
            StrategyKind::Paraphrase => "paraphrase",
            StrategyKind::Structure => "structure",
        }
    }

    /// True for strategies that issue one divide call per sentence.
    pub fn uses_llm(self) -> bool {
        matches!(self, StrategyKind::LlmPropositions | StrategyKind::Paraphrase)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "llm_propositions" | "propositions" | "llm" => Ok(StrategyKind::LlmPropositions),
            "words" => Ok(StrategyKind::Words),
            "repeat" => Ok(StrategyKind::Repeat),
            "paraphrase" => Ok(StrategyKind::Paraphrase),
            "structure" => Ok(StrategyKind::Structure),
            other => Err(format!("unknown decomposition strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionStrategy {
    pub kind: StrategyKind,
    #[serde(default = "default_repeat_count")]
    pub repeat_count: usize,
}

fn default_repeat_count() -> usize {
    DEFAULT_REPEAT_COUNT
}

impl DecompositionStrategy {
    pub fn new(kind: StrategyKind) -> Self {
        Self { kind, repeat_count: DEFAULT_REPEAT_COUNT }
    }
}

impl Default for DecompositionStrategy {
    fn default() -> Self {
        Self::new(StrategyKind::LlmPropositions)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseSet {
    pub original: String,
    pub phrases: Vec<String>,
    pub strategy: DecompositionStrategy,
}

/// Result of one decomposition, with the bookkeeping the trace needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub phrase_set: PhraseSet,
    /// Set when the LLM output held no list and the sentence stands in for it.
    pub fallback: bool,
    pub warnings: Vec<String>,
    pub llm_calls: usize,
    /// Leaves of the structure split, when that strategy ran.
    pub segments: Option<Vec<Segment>>,
}

/// Everything a strategy may need; unused fields are ignored.
#[derive(Clone, Copy)]
pub struct DecomposeContext<'a> {
    pub backend: Option<&'a dyn ChatBackend>,
    pub prompts: &'a PromptSet,
    pub trees: Option<&'a BTreeMap<usize, DependencyTree>>,
    pub stopwords: &'a StopWords,
    pub max_new_tokens: u32,
    pub max_words: usize,
}

impl<'a> DecomposeContext<'a> {
    pub fn new(prompts: &'a PromptSet, stopwords: &'a StopWords) -> Self {
        Self {
            backend: None,
            prompts,
            trees: None,
            stopwords,
            max_new_tokens: DEFAULT_DIVIDE_MAX_TOKENS,
            max_words: DEFAULT_MAX_WORDS,
        }
    }

    pub fn with_backend(mut self, backend: &'a dyn ChatBackend) -> Self {
        self.backend = Some(backend);
        self
    }

    pub fn with_trees(mut self, trees: &'a BTreeMap<usize, DependencyTree>) -> Self {
        self.trees = Some(trees);
        self
    }
}

/// Decomposes `sentence` (eval-set id `sentence_id`) with `strategy`. The
/// phrase list is never empty: an unparseable LLM answer falls back to the
/// sentence itself and is flagged.
pub fn decompose(
    sentence_id: usize,
    sentence: &str,
    strategy: DecompositionStrategy,
    ctx: &DecomposeContext<'_>,
) -> Result<Decomposition, DecomposeError> {
    let sentence = sentence.trim();
    if sentence.is_empty() {
        return Err(DecomposeError::EmptySentence);
    }
    let done = |phrases: Vec<String>| Decomposition {
        phrase_set: PhraseSet { original: sentence.to_string(), phrases, strategy },
        fallback: false,
        warnings: Vec::new(),
        llm_calls: 0,
        segments: None,
    };
    match strategy.kind {
        StrategyKind::Repeat => {
            if strategy.repeat_count == 0 {
                return Err(DecomposeError::InvalidRepeatCount);
            }
            Ok(done(vec![sentence.to_string(); strategy.repeat_count]))
        }
        StrategyKind::Words => Ok(done(content_words(sentence, ctx.stopwords))),
        StrategyKind::Structure => {
            let tree = ctx.trees.and_then(|t| t.get(&sentence_id)).ok_or(DecomposeError::MissingTree(sentence_id))?;
            let segments = structure_split(tree, ctx.max_words);
            let mut out = done(segments.iter().map(|s| s.text.clone()).collect());
            if tree.forms().join(" ") != sentence.split_whitespace().collect::<Vec<_>>().join(" ") {
                out.warnings.push("dependency tree tokens differ from the sentence".into());
            }
            for s in segments.iter().filter(|s| s.unsplittable) {
                out.warnings.push(format!("unsplittable segment of {} words: {}", s.len(), s.text));
            }
            out.segments = Some(segments);
            Ok(out)
        }
        StrategyKind::LlmPropositions | StrategyKind::Paraphrase => {
            let backend = ctx.backend.ok_or(DecomposeError::MissingBackend(strategy.kind))?;
            let mode = if strategy.kind == StrategyKind::Paraphrase {
                DivideMode::Paraphrase
            } else {
                DivideMode::Propositions
            };
            let prompt = ctx.prompts.render_divide(sentence, mode).map_err(|_| DecomposeError::EmptySentence)?;
            let output = complete_chat(backend, &ChatRequest::user(prompt, ctx.max_new_tokens))?;
            let mut out = match parse_propositions(&output, DEFAULT_PHRASE_CAP) {
                Ok(phrases) => done(phrases),
                Err(_) => {
                    let mut d = done(vec![sentence.to_string()]);
                    d.fallback = true;
                    d.warnings.push("no numbered list in decomposition output; using the sentence".into());
                    d
                }
            };
            out.llm_calls = 1;
            if mode == DivideMode::Paraphrase && !out.fallback && out.phrase_set.phrases.len() < EXPECTED_PARAPHRASES {
                out.warnings.push(format!(
                    "expected at least {EXPECTED_PARAPHRASES} paraphrases, got {}",
                    out.phrase_set.phrases.len()
                ));
            }
            Ok(out)
        }
    }
}

/// Paraphrase decomposition through the embedded template.
pub fn paraphrase_decompose(sentence: &str, backend: &dyn ChatBackend) -> Result<Decomposition, DecomposeError> {
    let prompts = PromptSet::embedded();
    let stopwords = StopWords::default();
    let ctx = DecomposeContext::new(&prompts, &stopwords).with_backend(backend);
    decompose(0, sentence, DecompositionStrategy::new(StrategyKind::Paraphrase), &ctx)
}
