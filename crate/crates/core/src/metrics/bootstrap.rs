//! Paired bootstrap resampling (Koehn-style) with a reproducible sampler.
//!
//! Sample `i` draws its indices from a SplitMix64 stream seeded with
//! `seed + i` (wrapping). Each index is the high 64 bits of
//! `next_u64() as u128 * n`. Sample scores are computed in parallel; the
//! result does not depend on scheduling.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub n_samples: usize,
    pub sample_size: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { n_samples: 300, sample_size: 500, alpha: 0.05, seed: 13 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub score_a: f64,
    pub score_b: f64,
    pub n_samples: usize,
    pub sample_size: usize,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
    /// Probability that A is not better than B: `1 - wins_a / n_samples`.
    pub p_value: f64,
    pub alpha: f64,
    pub significant: bool,
    pub seed: u64,
}

/// Indices of bootstrap sample `sample` over `n` items.
pub fn sample_indices(seed: u64, sample: usize, n: usize, size: usize) -> Vec<usize> {
    let mut rng = SplitMix64::seed_from_u64(seed.wrapping_add(sample as u64));
    (0..size).map(|_| ((rng.next_u64() as u128 * n as u128) >> 64) as usize).collect()
}

/// Runs the bootstrap over `n` paired items. `score` maps a multiset of item
/// indices to the `(A, B)` scores on that subset.
pub fn paired_bootstrap_with<F>(n: usize, cfg: &BootstrapConfig, score: F) -> SignificanceResult
where
    F: Fn(&[usize]) -> (f64, f64) + Sync,
{
    let all: Vec<usize> = (0..n).collect();
    let (score_a, score_b) = score(&all);
    let outcomes: Vec<std::cmp::Ordering> = (0..cfg.n_samples)
        .into_par_iter()
        .map(|i| {
            let (a, b) = score(&sample_indices(cfg.seed, i, n, cfg.sample_size));
            a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
        })
        .collect();
    let wins_a = outcomes.iter().filter(|o| o.is_gt()).count();
    let wins_b = outcomes.iter().filter(|o| o.is_lt()).count();
    let ties = cfg.n_samples - wins_a - wins_b;
    let p_value = if cfg.n_samples == 0 { 1.0 } else { 1.0 - wins_a as f64 / cfg.n_samples as f64 };
    SignificanceResult {
        score_a,
        score_b,
        n_samples: cfg.n_samples,
        sample_size: cfg.sample_size,
        wins_a,
        wins_b,
        ties,
        p_value,
        alpha: cfg.alpha,
        significant: p_value < cfg.alpha,
        seed: cfg.seed,
    }
}

/// Bootstrap over per-sentence scores, comparing means.
pub fn paired_bootstrap_scores(scores_a: &[f64], scores_b: &[f64], cfg: &BootstrapConfig) -> SignificanceResult {
    assert_eq!(scores_a.len(), scores_b.len(), "paired scores must have equal length");
    let mean = |xs: &[f64], idx: &[usize]| idx.iter().map(|&i| xs[i]).sum::<f64>() / idx.len().max(1) as f64;
    paired_bootstrap_with(scores_a.len(), cfg, |idx| (mean(scores_a, idx), mean(scores_b, idx)))
}
