use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::chrf::py_split;
use crate::retrieval::tokenize_cased;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BleuTokenizer {
    /// Whitespace split with punctuation stripped from token edges, case kept.
    WhitespacePunct,
    /// Input is already tokenized; tokens are separated by whitespace.
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BleuSmoothing {
    None,
    Exp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BleuConfig {
    pub max_n: usize,
    pub smoothing: BleuSmoothing,
    pub tokenizer: BleuTokenizer,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self { max_n: 4, smoothing: BleuSmoothing::Exp, tokenizer: BleuTokenizer::WhitespacePunct }
    }
}

impl BleuConfig {
    pub fn n_stats(&self) -> usize {
        2 + 2 * self.max_n
    }

    fn tokenize<'a>(&self, text: &'a str) -> Vec<std::borrow::Cow<'a, str>> {
        match self.tokenizer {
            BleuTokenizer::WhitespacePunct => tokenize_cased(text).into_iter().map(Into::into).collect(),
            BleuTokenizer::External => py_split(text).map(Into::into).collect(),
        }
    }
}

/// `[sys_len, ref_len, correct_1..correct_N, total_1..total_N]`.
pub fn bleu_stats(hyp: &str, reference: &str, cfg: &BleuConfig) -> Vec<u64> {
    let h = cfg.tokenize(hyp);
    let r = cfg.tokenize(reference);
    let mut stats = vec![0; cfg.n_stats()];
    stats[0] = h.len() as u64;
    stats[1] = r.len() as u64;
    for n in 1..=cfg.max_n {
        if h.len() < n {
            continue;
        }
        let mut ref_counts: HashMap<&[_], u64> = HashMap::new();
        if r.len() >= n {
            for g in r.windows(n) {
                *ref_counts.entry(g).or_default() += 1;
            }
        }
        let mut hyp_counts: HashMap<&[_], u64> = HashMap::new();
        for g in h.windows(n) {
            *hyp_counts.entry(g).or_default() += 1;
        }
        stats[1 + n] = hyp_counts.iter().map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0))).sum();
        stats[1 + cfg.max_n + n] = (h.len() + 1 - n) as u64;
    }
    stats
}

pub fn brevity_penalty(sys_len: u64, ref_len: u64) -> f64 {
    if sys_len >= ref_len {
        1.0
    } else if sys_len == 0 {
        0.0
    } else {
        (1.0 - ref_len as f64 / sys_len as f64).exp()
    }
}

/// Log that maps 0 to a huge negative number instead of -inf.
fn safe_log(x: f64) -> f64 {
    if x == 0.0 {
        -9_999_999_999.0
    } else {
        x.ln()
    }
}

/// Corpus BLEU from summed statistics. No matches at any order gives 0.
/// With exp smoothing the k-th zero-match order gets precision
/// `1 / (2^k * total_n)`; orders past the longest hypothesis contribute 0.
pub fn bleu_from_stats(stats: &[u64], cfg: &BleuConfig) -> f64 {
    let n = cfg.max_n;
    let (sys_len, ref_len) = (stats[0], stats[1]);
    let correct = &stats[2..2 + n];
    let total = &stats[2 + n..2 + 2 * n];
    if correct.iter().all(|&c| c == 0) {
        return 0.0;
    }
    let bp = brevity_penalty(sys_len, ref_len);
    let mut precisions = vec![0.0; n];
    let mut smooth = 1.0;
    for i in 0..n {
        if total[i] == 0 {
            break;
        }
        if correct[i] == 0 {
            if cfg.smoothing == BleuSmoothing::Exp {
                smooth *= 2.0;
                precisions[i] = 100.0 / (smooth * total[i] as f64);
            }
        } else {
            precisions[i] = 100.0 * correct[i] as f64 / total[i] as f64;
        }
    }
    bp * (precisions.iter().map(|&p| safe_log(p)).sum::<f64>() / n as f64).exp()
}
