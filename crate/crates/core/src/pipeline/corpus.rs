use std::collections::BTreeMap;
use std::io::Write;
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Pipeline, PipelineError, PipelineMode, TranslationRecord};
use crate::corpus::ParallelCorpus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: usize,
    pub n_errors: usize,
    pub n_fallbacks: usize,
    pub total_llm_calls: usize,
    pub wall_time_ms: u64,
}

impl Pipeline {
    /// Translates every source sentence of `eval`, writing one JSON record per
    /// line in sentence order as soon as all earlier sentences are done.
    /// Sentence failures are recorded, never fatal; only write errors abort.
    pub fn run_corpus<W: Write>(
        &self,
        eval: &ParallelCorpus,
        mode: PipelineMode,
        mut out: W,
    ) -> Result<RunSummary, PipelineError> {
        let start = Instant::now();
        let mut summary = RunSummary { n: 0, n_errors: 0, n_fallbacks: 0, total_llm_calls: 0, wall_time_ms: 0 };
        let (tx, rx) = mpsc::channel::<(usize, TranslationRecord)>();
        std::thread::scope(|scope| -> Result<(), PipelineError> {
            scope.spawn(move || {
                self.threads.install(|| {
                    eval.pairs().par_iter().enumerate().for_each_with(tx, |tx, (i, pair)| {
                        let _ = tx.send((i, self.translate(pair.id, &pair.source, mode)));
                    });
                });
            });
            let mut pending = BTreeMap::new();
            let mut next = 0;
            for (i, rec) in rx {
                pending.insert(i, rec);
                while let Some(rec) = pending.remove(&next) {
                    summary.n += 1;
                    summary.n_errors += rec.error.is_some() as usize;
                    summary.n_fallbacks += !rec.fallbacks.is_empty() as usize;
                    summary.total_llm_calls += rec.llm_calls;
                    serde_json::to_writer(&mut out, &rec).map_err(std::io::Error::from)?;
                    out.write_all(b"\n")?;
                    next += 1;
                }
            }
            Ok(())
        })?;
        out.flush()?;
        summary.wall_time_ms = start.elapsed().as_millis() as u64;
        Ok(summary)
    }
}

/// Drops every `wall_time_ms` field from a JSONL trace so runs can be
/// compared byte for byte.
pub fn strip_timing(trace: &str) -> String {
    fn strip(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                map.remove("wall_time_ms");
                map.values_mut().for_each(strip);
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    trace
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).expect("trace lines are JSON");
            strip(&mut v);
            v.to_string() + "\n"
        })
        .collect()
}
