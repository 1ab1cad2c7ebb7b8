//! Demonstration retrieval: BM25, LCS and cosine similarity over a selection pool.
//!
//! Every ranking obeys the same contract: scores non-increasing, ties broken
//! by ascending pool id, ineligible entries (empty target side) never returned.

mod bm25;
mod dense;
mod lcs;
mod tokenize;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub use bm25::{bm25_top_k, build_bm25_index, Bm25Index, DEFAULT_B, DEFAULT_K1};
pub use dense::{
    cosine_top_k, load_embedding_matrix, parse_embedding_matrix, CosineIndex, CosineRetriever, Embedder, HttpEmbedder,
};
pub use lcs::{lcs_length, lcs_top_k, LcsIndex};
pub use tokenize::{is_punctuation, tokenize_cased, tokenize_retrieval};

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("selection pool is empty")]
    EmptyPool,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("pool vector {0} is zero")]
    ZeroVector(usize),
    #[error("query vector is zero")]
    ZeroQuery,
    #[error("{vectors} embedding rows for a pool of {pool} sentences")]
    PoolSizeMismatch { vectors: usize, pool: usize },
    #[error("malformed embedding matrix at line {0}")]
    MalformedMatrix(usize),
    #[error("embedding service: {0}")]
    Embedding(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub pool_id: usize,
    pub score: f64,
}

/// Which similarity drives demonstration selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetrieverKind {
    Bm25,
    Lcs,
    Cosine,
}

impl std::str::FromStr for RetrieverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bm25" => Ok(RetrieverKind::Bm25),
            "lcs" => Ok(RetrieverKind::Lcs),
            "cosine" | "sonar" => Ok(RetrieverKind::Cosine),
            other => Err(format!("unknown retriever {other:?}")),
        }
    }
}

/// Ranks pool sentences against a text query.
pub trait Retriever: Send + Sync {
    fn top_k(&self, query: &str, k: usize) -> Result<Vec<ScoredCandidate>, RetrievalError>;
}

fn by_score_then_id(a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    b.score.total_cmp(&a.score).then(a.pool_id.cmp(&b.pool_id))
}

/// Positive scores first (descending, ties by id); zero-score entries only
/// pad the list up to `k`, in ascending id order.
pub(crate) fn rank_candidates(scores: &[f64], eligible: &[bool], k: usize) -> Vec<ScoredCandidate> {
    let mut positive: Vec<ScoredCandidate> = scores
        .iter()
        .enumerate()
        .filter(|&(i, &s)| eligible[i] && s > 0.0)
        .map(|(pool_id, &score)| ScoredCandidate { pool_id, score })
        .collect();
    positive.sort_by(by_score_then_id);
    positive.truncate(k);
    if positive.len() < k {
        let missing = k - positive.len();
        positive.extend(
            scores
                .iter()
                .enumerate()
                .filter(|&(i, &s)| eligible[i] && s <= 0.0)
                .take(missing)
                .map(|(pool_id, _)| ScoredCandidate { pool_id, score: 0.0 }),
        );
    }
    positive
}

/// Plain ranking of every eligible entry (used where scores may be negative).
pub(crate) fn rank_all(scores: &[f64], eligible: &[bool], k: usize) -> Vec<ScoredCandidate> {
    let mut all: Vec<ScoredCandidate> = scores
        .iter()
        .enumerate()
        .filter(|&(i, _)| eligible[i])
        .map(|(pool_id, &score)| ScoredCandidate { pool_id, score })
        .collect();
    all.sort_by(by_score_then_id);
    all.truncate(k);
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranking_contract() {
        let scores = [0.0, 2.0, 1.0, 2.0, 0.0, 3.0];
        let eligible = [true, true, true, true, true, false];
        let r = rank_candidates(&scores, &eligible, 5);
        let ids: Vec<_> = r.iter().map(|c| c.pool_id).collect();
        assert_eq!(ids, vec![1, 3, 2, 0, 4]);
        assert_eq!(rank_candidates(&scores, &eligible, 2).len(), 2);
    }
}
