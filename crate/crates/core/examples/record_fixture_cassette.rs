//! Regenerates tests/fixtures/pipeline/{pool,eval}.tsv, the cassette of a
//! compositional run over the eval set (synthetic responder) and the expected
//! trace with timing removed.
//!
//!     cargo run -p comptra --example record_fixture_cassette

#[path = "../tests/common/synthetic.rs"]
mod synthetic;

use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use comptra::corpus::ParallelCorpus;
use comptra::lang::LanguageTag;
use comptra::llm::{MockBackend, RecordingBackend};
use comptra::pipeline::{strip_timing, Languages, Pipeline, PipelineConfig, PipelineMode};

fn write_tsv(path: &Path, sources: &[&str]) -> io::Result<()> {
    let body: String = sources.iter().map(|s| format!("{s}\t{}\n", synthetic::transliterate(s))).collect();
    fs::write(path, body)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/pipeline");
    fs::create_dir_all(&dir)?;
    write_tsv(&dir.join("pool.tsv"), synthetic::POOL_SOURCES)?;
    write_tsv(&dir.join("eval.tsv"), synthetic::EVAL_SOURCES)?;

    let cassette = dir.join("cassette.jsonl");
    if cassette.exists() {
        fs::remove_file(&cassette)?;
    }
    let mock = MockBackend::from_fn(|req| Ok(synthetic::respond(req.prompt())));
    let backend = Arc::new(RecordingBackend::open(mock, &cassette)?);

    let langs = Languages { src: LanguageTag::from_code("eng_Latn")?, tgt: LanguageTag::from_code("amh_Ethi")? };
    let pool = ParallelCorpus::from_pairs(
        synthetic::POOL_SOURCES.iter().map(|s| (*s, synthetic::transliterate(s))),
        langs.src.clone(),
        langs.tgt.clone(),
    )?;
    let eval = ParallelCorpus::from_pairs(
        synthetic::EVAL_SOURCES.iter().map(|s| (*s, "")),
        langs.src.clone(),
        langs.tgt.clone(),
    )?;
    let pipeline = Pipeline::builder(PipelineConfig::default(), langs, Arc::new(pool), backend).build()?;
    let mut trace = Vec::new();
    let summary = pipeline.run_corpus(&eval, PipelineMode::Comptra, &mut trace)?;
    fs::write(dir.join("trace.jsonl"), strip_timing(&String::from_utf8(trace)?))?;
    eprintln!("recorded {} sentences, {} calls -> {}", summary.n, summary.total_llm_calls, cassette.display());
    Ok(())
}
