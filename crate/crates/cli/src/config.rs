//! Run configuration (`--config run.json`) and the manifest written next to
//! every trace. A manifest is itself a valid run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use comptra::corpus::CorpusFormat;
use comptra::llm::BackendConfig;
use comptra::pipeline::{PipelineConfig, PipelineMode, RunSummary};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Quality scorer used by ensemble mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerChoice {
    Lexical,
    Http { url: String },
}

/// Every field is optional in the file; command-line flags override it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub mode: Option<PipelineMode>,
    pub src: Option<String>,
    pub tgt: Option<String>,
    pub pool: Option<PathBuf>,
    pub pool_tgt: Option<PathBuf>,
    pub eval: Option<PathBuf>,
    pub eval_tgt: Option<PathBuf>,
    pub format: Option<CorpusFormat>,
    pub pipeline: PipelineConfig,
    pub backend: Option<BackendConfig>,
    pub prompt_dir: Option<PathBuf>,
    pub trees: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    /// Pool embedding matrix for the cosine retriever.
    pub pool_embeddings: Option<PathBuf>,
    /// Embedding service for cosine queries.
    pub embed_endpoint: Option<String>,
    pub scorer: Option<ScorerChoice>,
    /// Recorded for provenance; decoding is greedy and the pipeline draws no
    /// random numbers.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::flag("--config", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::flag("--config", format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
    #[serde(flatten)]
    pub config: RunConfig,
    pub summary: RunSummary,
}

impl RunManifest {
    pub fn new(config: RunConfig, summary: RunSummary) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            config,
            summary,
        }
    }
}

/// `trace.jsonl` → `trace.manifest.json`, in the same directory.
pub fn manifest_path(trace: &Path) -> PathBuf {
    let stem = trace.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trace".into());
    trace.with_file_name(format!("{stem}.manifest.json"))
}
