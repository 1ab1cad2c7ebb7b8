use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use comptra::corpus::{load_dependency_trees, load_parallel_corpus, validate_corpus, CorpusFormat, ParallelCorpus};
use comptra::decompose::{decompose, DecomposeContext, DecompositionStrategy, StopWords, StrategyKind};
use comptra::lang::LanguageTag;
use comptra::llm::{build_backend, BackendConfig, BackendKind, ChatBackend};
use comptra::metrics::{paired_bootstrap, BootstrapConfig, MetricConfig, MetricKind, SignificanceResult};
use comptra::pipeline::{HttpScorer, Languages, LexicalOverlapScorer, Pipeline, PipelineMode, QualityScorer};
use comptra::prompts::PromptSet;
use comptra::retrieval::{
    load_embedding_matrix, Bm25Index, CosineIndex, CosineRetriever, HttpEmbedder, LcsIndex, Retriever, RetrieverKind,
};
use serde::Serialize;

use crate::config::{manifest_path, RunConfig, RunManifest, ScorerChoice};
use crate::{BackendArgs, CliError, CompareArgs, DecomposeArgs, EvaluateArgs, RetrieveArgs, TranslateArgs};

const DEFAULT_AUTH_ENV: &str = "LLM_API_KEY";
const SERVICE_TIMEOUT: Duration = Duration::from_secs(60);

fn language(flag: &'static str, code: Option<&str>) -> Result<LanguageTag, CliError> {
    let code = code.ok_or_else(|| CliError::flag(flag, "required"))?;
    LanguageTag::from_code(code).map_err(|e| CliError::flag(flag, e.to_string()))
}

/// Overlays backend flags on `backend`. The kind must come from a flag or
/// the config file.
fn apply_backend_flags(backend: &mut Option<BackendConfig>, a: &BackendArgs) -> Result<(), CliError> {
    if let Some(kind) = a.backend {
        backend.get_or_insert_with(|| BackendConfig::new(kind)).kind = kind;
    }
    let Some(b) = backend.as_mut() else {
        return Err(CliError::flag("--backend", "no backend given (http, mock or cassette)"));
    };
    if let Some(v) = &a.endpoint {
        b.endpoint_url = Some(v.clone());
    }
    if let Some(v) = &a.model {
        b.model_name = Some(v.clone());
    }
    if let Some(v) = &a.auth_env {
        b.auth_env_var = Some(v.clone());
    }
    if let Some(v) = &a.cassette {
        b.cassette_path = Some(v.clone());
    }
    if let Some(v) = &a.mock_script {
        b.mock_script = Some(v.clone());
    }
    if let Some(v) = a.timeout {
        b.timeout_s = v;
    }
    if let Some(v) = a.max_retries {
        b.max_retries = v;
    }
    if b.kind == BackendKind::Http && b.auth_env_var.is_none() {
        b.auth_env_var = Some(DEFAULT_AUTH_ENV.to_string());
    }
    Ok(())
}

fn open_backend(config: &BackendConfig) -> Result<Arc<dyn ChatBackend>, CliError> {
    build_backend(config).map_err(|e| CliError::flag("--backend", e.to_string()))
}

fn load_corpus(
    flag: &'static str,
    source: &Path,
    target: Option<&Path>,
    format: Option<CorpusFormat>,
    langs: &Languages,
) -> Result<ParallelCorpus, CliError> {
    let format = format.unwrap_or_else(|| CorpusFormat::infer(source));
    load_parallel_corpus(source, target, format, langs.src.clone(), langs.tgt.clone())
        .map_err(|e| CliError::flag(flag, e.to_string()))
}

fn load_prompts(dir: Option<&Path>) -> Result<PromptSet, CliError> {
    match dir {
        Some(d) => PromptSet::from_dir(d).map_err(|e| CliError::flag("--prompt-dir", e.to_string())),
        None => Ok(PromptSet::embedded()),
    }
}

fn load_stopwords(path: Option<&Path>) -> Result<StopWords, CliError> {
    match path {
        Some(p) => StopWords::load(p).map_err(|e| CliError::flag("--stopwords", format!("{}: {e}", p.display()))),
        None => Ok(StopWords::english()),
    }
}

fn cosine_retriever(
    pool: &ParallelCorpus,
    embeddings: Option<&Path>,
    endpoint: Option<&str>,
) -> Result<Arc<dyn Retriever>, CliError> {
    let path = embeddings.ok_or_else(|| CliError::flag("--pool-embeddings", "required by the cosine retriever"))?;
    let url = endpoint.ok_or_else(|| CliError::flag("--embed-endpoint", "required by the cosine retriever"))?;
    let vectors = load_embedding_matrix(path).map_err(|e| CliError::flag("--pool-embeddings", e.to_string()))?;
    if vectors.len() != pool.len() {
        return Err(CliError::flag(
            "--pool-embeddings",
            format!("{} vectors for a pool of {}", vectors.len(), pool.len()),
        ));
    }
    let eligible = pool.targets().map(|t| !t.is_empty()).collect();
    let index =
        CosineIndex::new(vectors, Some(eligible)).map_err(|e| CliError::flag("--pool-embeddings", e.to_string()))?;
    let embedder =
        HttpEmbedder::new(url, SERVICE_TIMEOUT).map_err(|e| CliError::flag("--embed-endpoint", e.to_string()))?;
    Ok(Arc::new(CosineRetriever::new(index, Box::new(embedder))))
}

/// Flags > config file > defaults.
fn resolve_translate(a: &TranslateArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &a.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    macro_rules! take {
        ($($field:ident),*) => { $( if a.$field.is_some() { cfg.$field = a.$field.clone(); } )* };
    }
    take!(
        mode,
        src,
        tgt,
        pool,
        pool_tgt,
        eval,
        eval_tgt,
        format,
        prompt_dir,
        trees,
        stopwords,
        pool_embeddings,
        embed_endpoint,
        seed,
        out
    );
    let p = &mut cfg.pipeline;
    if let Some(v) = a.retriever {
        p.retriever = v;
    }
    if let Some(v) = a.strategy {
        p.strategy.kind = v;
    }
    if let Some(v) = a.repeat_count {
        p.strategy.repeat_count = v;
    }
    if let Some(v) = a.k {
        p.k = v;
    }
    if let Some(v) = a.parallelism {
        p.parallelism = v;
    }
    if let Some(v) = a.phrase_translator {
        p.phrase_translator = v;
    }
    if let Some(v) = &a.external_mt_endpoint {
        p.external_mt_endpoint = Some(v.clone());
    }
    match (a.scorer.as_deref(), &a.scorer_endpoint) {
        (None, None) => {}
        (Some("lexical"), _) => cfg.scorer = Some(ScorerChoice::Lexical),
        (Some("http") | None, Some(url)) => cfg.scorer = Some(ScorerChoice::Http { url: url.clone() }),
        (Some("http"), None) => return Err(CliError::flag("--scorer-endpoint", "required by the http scorer")),
        (Some(other), _) => {
            return Err(CliError::flag("--scorer", format!("unknown scorer {other:?} (lexical or http)")))
        }
    }
    apply_backend_flags(&mut cfg.backend, &a.backend)?;
    cfg.mode.get_or_insert(PipelineMode::Comptra);
    Ok(cfg)
}

pub fn cmd_translate(args: TranslateArgs) -> Result<u8, CliError> {
    let cfg = resolve_translate(&args)?;
    let mode = cfg.mode.expect("resolved");
    let langs = Languages { src: language("--src", cfg.src.as_deref())?, tgt: language("--tgt", cfg.tgt.as_deref())? };
    cfg.pipeline.validate().map_err(|e| CliError::flag("--config", e.to_string()))?;
    let out_path = cfg.out.clone().ok_or_else(|| CliError::flag("--out", "required"))?;
    let eval_path = cfg.eval.as_deref().ok_or_else(|| CliError::flag("--eval", "required"))?;
    let eval = load_corpus("--eval", eval_path, cfg.eval_tgt.as_deref(), cfg.format, &langs)?;
    let pool = match cfg.pool.as_deref() {
        Some(p) => load_corpus("--pool", p, cfg.pool_tgt.as_deref(), cfg.format, &langs)?,
        None if mode.needs_retrieval() => return Err(CliError::flag("--pool", format!("required by mode {mode}"))),
        None => ParallelCorpus::from_pairs(Vec::<(String, String)>::new(), langs.src.clone(), langs.tgt.clone())
            .map_err(CliError::run)?,
    };
    let decomposes = matches!(mode, PipelineMode::Comptra | PipelineMode::Ensemble);
    let trees = match cfg.trees.as_deref() {
        Some(p) => Some(load_dependency_trees(p).map_err(|e| CliError::flag("--trees", e.to_string()))?),
        None if decomposes && cfg.pipeline.strategy.kind == StrategyKind::Structure => {
            return Err(CliError::flag("--trees", "required by the structure strategy"));
        }
        None => None,
    };
    let report = validate_corpus(&pool);
    if report.has_warnings() {
        eprintln!(
            "warning: pool has {} empty targets (never used as demonstrations) and {} duplicate sources",
            report.empty_targets, report.duplicate_sources
        );
    }
    let backend = open_backend(cfg.backend.as_ref().expect("resolved"))?;
    let pool = Arc::new(pool);

    let mut builder = Pipeline::builder(cfg.pipeline.clone(), langs, pool.clone(), backend)
        .prompts(load_prompts(cfg.prompt_dir.as_deref())?)
        .stopwords(load_stopwords(cfg.stopwords.as_deref())?);
    if let Some(trees) = trees {
        builder = builder.trees(trees);
    }
    if mode.needs_retrieval() && cfg.pipeline.retriever == RetrieverKind::Cosine {
        builder =
            builder.retriever(cosine_retriever(&pool, cfg.pool_embeddings.as_deref(), cfg.embed_endpoint.as_deref())?);
    }
    match &cfg.scorer {
        Some(ScorerChoice::Lexical) => builder = builder.scorer(Arc::new(LexicalOverlapScorer)),
        Some(ScorerChoice::Http { url }) => {
            let scorer: Arc<dyn QualityScorer> = Arc::new(
                HttpScorer::new(url.as_str(), SERVICE_TIMEOUT)
                    .map_err(|e| CliError::flag("--scorer-endpoint", e.to_string()))?,
            );
            builder = builder.scorer(scorer);
        }
        None if mode == PipelineMode::Ensemble => {
            return Err(CliError::flag("--scorer", "ensemble mode needs a quality scorer"));
        }
        None => {}
    }
    let pipeline = builder.build().map_err(|e| CliError::flag("--config", e.to_string()))?;

    let file = File::create(&out_path).map_err(|e| CliError::flag("--out", format!("{}: {e}", out_path.display())))?;
    let mut writer = BufWriter::new(file);
    let summary = pipeline.run_corpus(&eval, mode, &mut writer).map_err(CliError::run)?;
    writer.flush().map_err(CliError::run)?;

    let manifest = RunManifest::new(cfg, summary.clone());
    let manifest_file = manifest_path(&out_path);
    fs::write(&manifest_file, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")
        .map_err(|e| CliError::run(format!("{}: {e}", manifest_file.display())))?;
    eprintln!(
        "{} sentences, {} errors, {} fallbacks, {} LLM calls -> {}",
        summary.n,
        summary.n_errors,
        summary.n_fallbacks,
        summary.total_llm_calls,
        out_path.display()
    );
    Ok(if summary.n_errors > 0 { 2 } else { 0 })
}

/// Plain text lines, or the `final` field of a trace ordered by sentence id.
fn read_hypotheses(flag: &'static str, path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::flag(flag, format!("{}: {e}", path.display())))?;
    if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
        return Ok(text.lines().map(str::to_string).collect());
    }
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| CliError::flag(flag, format!("{}:{}: {e}", path.display(), i + 1)))?;
        let id = v["sentence_id"].as_u64().unwrap_or(i as u64);
        let hyp = v["final"].as_str().unwrap_or_default().to_string();
        records.push((id, hyp));
    }
    records.sort_by_key(|r| r.0);
    Ok(records.into_iter().map(|r| r.1).collect())
}

fn read_lines(flag: &'static str, path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::flag(flag, format!("{}: {e}", path.display())))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

#[derive(Serialize)]
struct EvaluateReport {
    metric: MetricKind,
    score: f64,
    n: usize,
}

pub fn cmd_evaluate(args: EvaluateArgs) -> Result<u8, CliError> {
    let hyps = read_hypotheses("--hyp", &args.hyp)?;
    let refs = read_lines("--ref", &args.reference)?;
    let score = MetricConfig::new(args.metric).corpus_score(&hyps, &refs).map_err(CliError::run)?;
    print_json(&EvaluateReport { metric: args.metric, score, n: hyps.len() });
    Ok(0)
}

#[derive(Serialize)]
struct CompareReport {
    metric: MetricKind,
    n: usize,
    hyp_a: PathBuf,
    hyp_b: PathBuf,
    #[serde(flatten)]
    result: SignificanceResult,
}

pub fn cmd_compare(args: CompareArgs) -> Result<u8, CliError> {
    let a = read_hypotheses("--hyp-a", &args.hyp_a)?;
    let b = read_hypotheses("--hyp-b", &args.hyp_b)?;
    let refs = read_lines("--ref", &args.reference)?;
    let cfg = BootstrapConfig {
        n_samples: args.n_samples,
        sample_size: args.sample_size,
        alpha: args.alpha,
        seed: args.seed,
    };
    let result = paired_bootstrap(&a, &b, &refs, &MetricConfig::new(args.metric), &cfg).map_err(CliError::run)?;
    print_json(&CompareReport { metric: args.metric, n: refs.len(), hyp_a: args.hyp_a, hyp_b: args.hyp_b, result });
    Ok(0)
}

pub fn cmd_decompose(args: DecomposeArgs) -> Result<u8, CliError> {
    let mut strategy = DecompositionStrategy::new(args.strategy);
    if let Some(n) = args.repeat_count {
        strategy.repeat_count = n;
    }
    let trees = match (&args.trees, args.strategy) {
        (Some(p), _) => Some(load_dependency_trees(p).map_err(|e| CliError::flag("--trees", e.to_string()))?),
        (None, StrategyKind::Structure) => return Err(CliError::flag("--trees", "required by the structure strategy")),
        (None, _) => None,
    };
    let backend = if args.strategy.uses_llm() {
        let mut cfg = None;
        apply_backend_flags(&mut cfg, &args.backend)?;
        Some(open_backend(cfg.as_ref().expect("set"))?)
    } else {
        None
    };
    let prompts = load_prompts(args.prompt_dir.as_deref())?;
    let stopwords = load_stopwords(args.stopwords.as_deref())?;
    let mut ctx = DecomposeContext::new(&prompts, &stopwords);
    if let Some(b) = &backend {
        ctx = ctx.with_backend(b.as_ref());
    }
    if let Some(t) = &trees {
        ctx = ctx.with_trees(t);
    }
    let d = decompose(args.sentence_id, &args.sentence, strategy, &ctx).map_err(CliError::run)?;
    print_json(&serde_json::json!({
        "original": d.phrase_set.original,
        "phrases": d.phrase_set.phrases,
        "strategy": d.phrase_set.strategy,
        "fallback": d.fallback,
        "warnings": d.warnings,
        "llm_calls": d.llm_calls,
        "segments": d.segments,
    }));
    Ok(0)
}

#[derive(Serialize)]
struct RetrievedDemo<'a> {
    pool_id: usize,
    score: f64,
    source: &'a str,
    target: &'a str,
}

pub fn cmd_retrieve(args: RetrieveArgs) -> Result<u8, CliError> {
    let langs = Languages { src: language("--src", Some(&args.src))?, tgt: language("--tgt", Some(&args.tgt))? };
    let pool = load_corpus("--pool", &args.pool, args.pool_tgt.as_deref(), args.format, &langs)?;
    let retriever: Arc<dyn Retriever> = match args.retriever {
        RetrieverKind::Bm25 => {
            Arc::new(Bm25Index::with_defaults(&pool).map_err(|e| CliError::flag("--pool", e.to_string()))?)
        }
        RetrieverKind::Lcs => Arc::new(LcsIndex::build(&pool).map_err(|e| CliError::flag("--pool", e.to_string()))?),
        RetrieverKind::Cosine => {
            cosine_retriever(&pool, args.pool_embeddings.as_deref(), args.embed_endpoint.as_deref())?
        }
    };
    let hits = retriever.top_k(&args.query, args.k).map_err(CliError::run)?;
    let out: Vec<RetrievedDemo> = hits
        .iter()
        .map(|h| {
            let pair = pool.get(h.pool_id).expect("retrieved ids index the pool");
            RetrievedDemo { pool_id: h.pool_id, score: h.score, source: &pair.source, target: &pair.target }
        })
        .collect();
    print_json(&out);
    Ok(0)
}
