use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChrfConfig {
    pub char_n: usize,
    pub word_n: usize,
    pub beta: f64,
    /// Average only over orders that have both hypothesis and reference
    /// n-grams; when false every order contributes an epsilon-smoothed F.
    pub effective_order: bool,
    pub whitespace_in_chars: bool,
}

impl Default for ChrfConfig {
    fn default() -> Self {
        Self { char_n: 6, word_n: 2, beta: 2.0, effective_order: true, whitespace_in_chars: false }
    }
}

impl ChrfConfig {
    pub fn n_stats(&self) -> usize {
        3 * (self.char_n + self.word_n)
    }
}

const EPS: f64 = 1e-16;

/// ASCII punctuation split off word edges for the word n-grams.
fn is_edge_punct(c: char) -> bool {
    c.is_ascii_punctuation()
}

/// Whitespace split matching Python's `str.split()`, which also breaks on
/// the ASCII information separators.
pub(crate) fn py_split(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)).filter(|s| !s.is_empty())
}

/// Words with one trailing (else one leading) punctuation mark split off.
fn chrf_words(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for w in py_split(text) {
        let mut chars = w.chars();
        let first = chars.next().expect("split yields non-empty words");
        let Some(last) = chars.next_back() else {
            out.push(w);
            continue;
        };
        if is_edge_punct(last) {
            let cut = w.len() - last.len_utf8();
            out.extend([&w[..cut], &w[cut..]]);
        } else if is_edge_punct(first) {
            let cut = first.len_utf8();
            out.extend([&w[..cut], &w[cut..]]);
        } else {
            out.push(w);
        }
    }
    out
}

fn ngram_counts<T: Eq + Hash>(items: &[T], n: usize) -> HashMap<&[T], u64> {
    let mut counts = HashMap::new();
    if items.len() >= n {
        for g in items.windows(n) {
            *counts.entry(g).or_default() += 1;
        }
    }
    counts
}

/// `[hyp, ref, match]`; hypothesis n-grams only count when the reference has
/// n-grams of that order.
fn match_stats<K: Eq + Hash>(hyp: &HashMap<K, u64>, reference: &HashMap<K, u64>) -> [u64; 3] {
    let mut hyp_total = 0;
    let mut matched = 0;
    for (g, &c) in hyp {
        hyp_total += c;
        if let Some(&r) = reference.get(g) {
            matched += c.min(r);
        }
    }
    let ref_total = reference.values().sum();
    [if reference.is_empty() { 0 } else { hyp_total }, ref_total, matched]
}

/// Per-order statistics of one sentence pair: character orders first, then
/// word orders, three counts each.
pub fn chrf_stats(hyp: &str, reference: &str, cfg: &ChrfConfig) -> Vec<u64> {
    let chars = |s: &str| -> Vec<char> {
        if cfg.whitespace_in_chars {
            s.chars().collect()
        } else {
            py_split(s).flat_map(str::chars).collect()
        }
    };
    let (hc, rc) = (chars(hyp), chars(reference));
    let mut stats = Vec::with_capacity(cfg.n_stats());
    for n in 1..=cfg.char_n {
        stats.extend(match_stats(&ngram_counts(&hc, n), &ngram_counts(&rc, n)));
    }
    let (hw, rw) = (chrf_words(hyp), chrf_words(reference));
    for n in 1..=cfg.word_n {
        stats.extend(match_stats(&ngram_counts(&hw, n), &ngram_counts(&rw, n)));
    }
    stats
}

pub fn chrf_from_stats(stats: &[u64], cfg: &ChrfConfig) -> f64 {
    let factor = cfg.beta * cfg.beta;
    let orders = cfg.char_n + cfg.word_n;
    let (mut avg_prec, mut avg_rec, mut effective, mut eps_sum) = (0.0, 0.0, 0usize, 0.0);
    for i in 0..orders {
        let (n_hyp, n_ref, n_match) = (stats[3 * i] as f64, stats[3 * i + 1] as f64, stats[3 * i + 2] as f64);
        let prec = if n_hyp > 0.0 { n_match / n_hyp } else { EPS };
        let rec = if n_ref > 0.0 { n_match / n_ref } else { EPS };
        let denom = factor * prec + rec;
        eps_sum += if denom > 0.0 { (1.0 + factor) * prec * rec / denom } else { EPS };
        if n_hyp > 0.0 && n_ref > 0.0 {
            avg_prec += prec;
            avg_rec += rec;
            effective += 1;
        }
    }
    if !cfg.effective_order {
        return 100.0 * eps_sum / orders as f64;
    }
    if effective == 0 {
        return 0.0;
    }
    avg_prec /= effective as f64;
    avg_rec /= effective as f64;
    if avg_prec + avg_rec > 0.0 {
        100.0 * (1.0 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_punctuation_split() {
        assert_eq!(chrf_words("(hi) there, x !a"), ["(hi", ")", "there", ",", "x", "!", "a"]);
        assert_eq!(chrf_words("ሰላም።"), ["ሰላም።"]);
    }

    #[test]
    fn empty_hypothesis_scores_zero() {
        let cfg = ChrfConfig::default();
        assert_eq!(chrf_from_stats(&chrf_stats("", "abc", &cfg), &cfg), 0.0);
        assert_eq!(chrf_from_stats(&chrf_stats("abc def", "abc def", &cfg), &cfg), 100.0);
    }

    #[test]
    fn hypothesis_counts_dropped_for_orders_missing_in_reference() {
        let cfg = ChrfConfig::default();
        let stats = chrf_stats("abcdef", "ab", &cfg);
        // order 3 onwards: the reference has no n-grams.
        assert_eq!(&stats[6..9], &[0, 0, 0]);
        assert_eq!(&stats[0..3], &[6, 2, 2]);
    }
}
