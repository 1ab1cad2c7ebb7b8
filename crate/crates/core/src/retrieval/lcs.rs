use super::{rank_candidates, RetrievalError, Retriever, ScoredCandidate};
use crate::corpus::ParallelCorpus;
use crate::retrieval::tokenize_retrieval;

/// Length of the longest common subsequence of two sequences.
///
/// Two-row dynamic program, `O(|a|·|b|)` time and `O(min(|a|,|b|))` memory.
pub fn lcs_length<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; short.len() + 1];
    let mut curr = vec![0usize; short.len() + 1];
    for x in long {
        for (j, y) in short.iter().enumerate() {
            curr[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(curr[j]) };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

/// Pool sentences pre-tokenized for LCS ranking.
#[derive(Debug, Clone)]
pub struct LcsIndex {
    doc_tokens: Vec<Vec<String>>,
    eligible: Vec<bool>,
}

impl LcsIndex {
    pub fn build(corpus: &ParallelCorpus) -> Result<Self, RetrievalError> {
        if corpus.is_empty() {
            return Err(RetrievalError::EmptyPool);
        }
        Ok(Self {
            doc_tokens: corpus.sources().map(tokenize_retrieval).collect(),
            eligible: corpus.targets().map(|t| !t.is_empty()).collect(),
        })
    }

    pub fn top_k(&self, query: &str, k: usize) -> Vec<ScoredCandidate> {
        let q = tokenize_retrieval(query);
        if q.is_empty() || k == 0 {
            return Vec::new();
        }
        let scores: Vec<f64> = self.doc_tokens.iter().map(|d| lcs_length(&q, d) as f64).collect();
        rank_candidates(&scores, &self.eligible, k)
    }
}

impl Retriever for LcsIndex {
    fn top_k(&self, query: &str, k: usize) -> Result<Vec<ScoredCandidate>, RetrievalError> {
        Ok(LcsIndex::top_k(self, query, k))
    }
}

/// Convenience wrapper building a throwaway index.
pub fn lcs_top_k(corpus: &ParallelCorpus, query: &str, k: usize) -> Result<Vec<ScoredCandidate>, RetrievalError> {
    Ok(LcsIndex::build(corpus)?.top_k(query, k))
}
