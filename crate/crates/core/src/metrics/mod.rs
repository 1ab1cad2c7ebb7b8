//! Corpus BLEU and chrF++ computed from per-sentence sufficient statistics,
//! plus paired bootstrap comparison.

mod bleu;
mod bootstrap;
mod chrf;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bleu::{bleu_from_stats, bleu_stats, brevity_penalty, BleuConfig, BleuSmoothing, BleuTokenizer};
pub use bootstrap::{
    paired_bootstrap_scores, paired_bootstrap_with, sample_indices, BootstrapConfig, SignificanceResult,
};
pub use chrf::{chrf_from_stats, chrf_stats, ChrfConfig};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("{hyps} hypotheses but {refs} references")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("{a} hypotheses for system A but {b} for system B")]
    SystemLengthMismatch { a: usize, b: usize },
    #[error("cannot score an empty corpus")]
    EmptyCorpus,
    #[error("invalid metric configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Bleu,
    Chrfpp,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Bleu => "bleu",
            MetricKind::Chrfpp => "chrfpp",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bleu" => Ok(MetricKind::Bleu),
            "chrfpp" | "chrf++" | "chrf" => Ok(MetricKind::Chrfpp),
            other => Err(format!("unknown metric `{other}` (expected bleu or chrfpp)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub metric: MetricKind,
    #[serde(default)]
    pub bleu: BleuConfig,
    #[serde(default)]
    pub chrfpp: ChrfConfig,
}

impl MetricConfig {
    pub fn new(metric: MetricKind) -> Self {
        Self { metric, bleu: BleuConfig::default(), chrfpp: ChrfConfig::default() }
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        let bad = |m: &str| Err(MetricError::InvalidConfig(m.into()));
        match self.metric {
            MetricKind::Bleu if self.bleu.max_n == 0 => bad("bleu.max_n must be at least 1"),
            MetricKind::Chrfpp if self.chrfpp.char_n == 0 => bad("chrfpp.char_n must be at least 1"),
            MetricKind::Chrfpp if !self.chrfpp.beta.is_finite() || self.chrfpp.beta <= 0.0 => {
                bad("chrfpp.beta must be positive")
            }
            _ => Ok(()),
        }
    }

    pub fn sentence_stats(&self, hyp: &str, reference: &str) -> Vec<u64> {
        match self.metric {
            MetricKind::Bleu => bleu_stats(hyp, reference, &self.bleu),
            MetricKind::Chrfpp => chrf_stats(hyp, reference, &self.chrfpp),
        }
    }

    pub fn score_stats(&self, stats: &[u64]) -> f64 {
        match self.metric {
            MetricKind::Bleu => bleu_from_stats(stats, &self.bleu),
            MetricKind::Chrfpp => chrf_from_stats(stats, &self.chrfpp),
        }
    }

    fn width(&self) -> usize {
        match self.metric {
            MetricKind::Bleu => self.bleu.n_stats(),
            MetricKind::Chrfpp => self.chrfpp.n_stats(),
        }
    }

    /// Per-sentence statistics for a whole corpus.
    pub fn corpus_stats<H: AsRef<str>, R: AsRef<str>>(
        &self,
        hyps: &[H],
        refs: &[R],
    ) -> Result<Vec<Vec<u64>>, MetricError> {
        self.validate()?;
        if hyps.len() != refs.len() {
            return Err(MetricError::LengthMismatch { hyps: hyps.len(), refs: refs.len() });
        }
        if hyps.is_empty() {
            return Err(MetricError::EmptyCorpus);
        }
        Ok(hyps.iter().zip(refs).map(|(h, r)| self.sentence_stats(h.as_ref(), r.as_ref())).collect())
    }

    /// Score of the multiset of sentences `indices`.
    pub fn score_subset(&self, stats: &[Vec<u64>], indices: &[usize]) -> f64 {
        let mut total = vec![0u64; self.width()];
        for &i in indices {
            for (t, s) in total.iter_mut().zip(&stats[i]) {
                *t += s;
            }
        }
        self.score_stats(&total)
    }

    pub fn corpus_score<H: AsRef<str>, R: AsRef<str>>(&self, hyps: &[H], refs: &[R]) -> Result<f64, MetricError> {
        let stats = self.corpus_stats(hyps, refs)?;
        let all: Vec<usize> = (0..stats.len()).collect();
        Ok(self.score_subset(&stats, &all))
    }
}

pub fn bleu_corpus<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R], cfg: &BleuConfig) -> Result<f64, MetricError> {
    MetricConfig { metric: MetricKind::Bleu, bleu: cfg.clone(), chrfpp: ChrfConfig::default() }.corpus_score(hyps, refs)
}

pub fn chrfpp_corpus<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    cfg: &ChrfConfig,
) -> Result<f64, MetricError> {
    MetricConfig { metric: MetricKind::Chrfpp, bleu: BleuConfig::default(), chrfpp: cfg.clone() }
        .corpus_score(hyps, refs)
}

/// Compares two systems on the same references: per-sentence statistics are
/// computed once and summed per bootstrap sample.
pub fn paired_bootstrap<A: AsRef<str>, B: AsRef<str>, R: AsRef<str>>(
    hyps_a: &[A],
    hyps_b: &[B],
    refs: &[R],
    metric: &MetricConfig,
    cfg: &BootstrapConfig,
) -> Result<SignificanceResult, MetricError> {
    if hyps_a.len() != hyps_b.len() {
        return Err(MetricError::SystemLengthMismatch { a: hyps_a.len(), b: hyps_b.len() });
    }
    let stats_a = metric.corpus_stats(hyps_a, refs)?;
    let stats_b = metric.corpus_stats(hyps_b, refs)?;
    Ok(paired_bootstrap_with(refs.len(), cfg, |idx| {
        (metric.score_subset(&stats_a, idx), metric.score_subset(&stats_b, idx))
    }))
}
