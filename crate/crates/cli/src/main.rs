mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use comptra::corpus::CorpusFormat;
use comptra::decompose::StrategyKind;
use comptra::llm::BackendKind;
use comptra::metrics::MetricKind;
use comptra::pipeline::{PhraseTranslator, PipelineMode};
use comptra::retrieval::RetrieverKind;

/// Fatal errors: reported on stderr, exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{flag}: {message}")]
    Flag { flag: &'static str, message: String },
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn flag(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Flag { flag, message: message.into() }
    }

    pub fn run(e: impl ToString) -> Self {
        CliError::Run(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "comptra", version, about = "Compositional translation with LLMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate an evaluation set and write a JSONL trace plus a manifest.
    Translate(Box<TranslateArgs>),
    /// Score hypotheses against references.
    Evaluate(EvaluateArgs),
    /// Paired bootstrap comparison of two systems.
    Compare(CompareArgs),
    /// Print the phrase set for one sentence.
    Decompose(DecomposeArgs),
    /// Print the top-k demonstrations for one query.
    Retrieve(RetrieveArgs),
}

#[derive(Args, Clone, Default)]
pub struct BackendArgs {
    #[arg(long, value_parser = parse::<BackendKind>)]
    pub backend: Option<BackendKind>,
    /// Base URL of an OpenAI-compatible API (`/chat/completions` is appended).
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Environment variable holding the bearer token.
    #[arg(long)]
    pub auth_env: Option<String>,
    /// Replay file for `cassette`; recording file for `http`.
    #[arg(long)]
    pub cassette: Option<PathBuf>,
    #[arg(long)]
    pub mock_script: Option<PathBuf>,
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long)]
    pub max_retries: Option<u32>,
}

#[derive(Args, Clone, Default)]
pub struct TranslateArgs {
    #[arg(long, value_parser = parse::<PipelineMode>)]
    pub mode: Option<PipelineMode>,
    /// Selection pool (source side, or a TSV/JSONL file with both sides).
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[arg(long)]
    pub pool_tgt: Option<PathBuf>,
    #[arg(long)]
    pub eval: Option<PathBuf>,
    #[arg(long)]
    pub eval_tgt: Option<PathBuf>,
    /// Corpus layout; inferred from the file extension when omitted.
    #[arg(long, value_parser = parse::<CorpusFormat>)]
    pub format: Option<CorpusFormat>,
    #[arg(long)]
    pub src: Option<String>,
    #[arg(long)]
    pub tgt: Option<String>,
    #[arg(long, value_parser = parse::<RetrieverKind>)]
    pub retriever: Option<RetrieverKind>,
    #[arg(long, value_parser = parse::<StrategyKind>)]
    pub strategy: Option<StrategyKind>,
    #[arg(long)]
    pub repeat_count: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long, value_parser = parse::<PhraseTranslator>)]
    pub phrase_translator: Option<PhraseTranslator>,
    #[arg(long)]
    pub external_mt_endpoint: Option<String>,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub prompt_dir: Option<PathBuf>,
    /// CoNLL-U parses of the eval sentences (structure strategy).
    #[arg(long)]
    pub trees: Option<PathBuf>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub pool_embeddings: Option<PathBuf>,
    #[arg(long)]
    pub embed_endpoint: Option<String>,
    /// Ensemble selector: `lexical`, or `http` with --scorer-endpoint.
    #[arg(long)]
    pub scorer: Option<String>,
    #[arg(long)]
    pub scorer_endpoint: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Plain text (one hypothesis per line) or a trace `.jsonl`.
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long, default_value = "chrfpp", value_parser = parse::<MetricKind>)]
    pub metric: MetricKind,
}

#[derive(Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub hyp_a: PathBuf,
    #[arg(long)]
    pub hyp_b: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long, default_value = "chrfpp", value_parser = parse::<MetricKind>)]
    pub metric: MetricKind,
    #[arg(long, default_value_t = 13)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub n_samples: usize,
    #[arg(long, default_value_t = 500)]
    pub sample_size: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub sentence: String,
    #[arg(long, default_value = "llm_propositions", value_parser = parse::<StrategyKind>)]
    pub strategy: StrategyKind,
    #[arg(long)]
    pub repeat_count: Option<usize>,
    #[arg(long)]
    pub trees: Option<PathBuf>,
    /// Which tree in --trees belongs to the sentence.
    #[arg(long, default_value_t = 0)]
    pub sentence_id: usize,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub prompt_dir: Option<PathBuf>,
    #[command(flatten)]
    pub backend: BackendArgs,
}

#[derive(Args)]
pub struct RetrieveArgs {
    #[arg(long)]
    pub pool: PathBuf,
    #[arg(long)]
    pub pool_tgt: Option<PathBuf>,
    #[arg(long, value_parser = parse::<CorpusFormat>)]
    pub format: Option<CorpusFormat>,
    #[arg(long, default_value = "eng_Latn")]
    pub src: String,
    #[arg(long, default_value = "amh_Ethi")]
    pub tgt: String,
    #[arg(long)]
    pub query: String,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value = "bm25", value_parser = parse::<RetrieverKind>)]
    pub retriever: RetrieverKind,
    #[arg(long)]
    pub pool_embeddings: Option<PathBuf>,
    #[arg(long)]
    pub embed_endpoint: Option<String>,
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Translate(a) => commands::cmd_translate(*a),
        Command::Evaluate(a) => commands::cmd_evaluate(a),
        Command::Compare(a) => commands::cmd_compare(a),
        Command::Decompose(a) => commands::cmd_decompose(a),
        Command::Retrieve(a) => commands::cmd_retrieve(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
