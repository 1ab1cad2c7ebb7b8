//! Okapi BM25 over pool source sentences.
//!
//! score(q, d) = Σ_{t ∈ distinct(q)} idf(t) · tf·(k1+1) / (tf + k1·(1 − b + b·|d|/avgdl))
//! with the non-negative idf(t) = ln(1 + (N − df + 0.5)/(df + 0.5)).

use std::collections::HashMap;

use super::{rank_candidates, tokenize_retrieval, RetrievalError, Retriever, ScoredCandidate};
use crate::corpus::ParallelCorpus;

pub const DEFAULT_K1: f64 = 1.5;
pub const DEFAULT_B: f64 = 0.75;

#[derive(Debug, Clone)]
pub struct Bm25Index {
    doc_tokens: Vec<Vec<String>>,
    doc_freq: HashMap<String, usize>,
    postings: HashMap<String, Vec<(usize, u32)>>,
    avg_doc_len: f64,
    k1: f64,
    b: f64,
    eligible: Vec<bool>,
}

/// Contribution of one query term to one document.
#[inline]
fn term_weight(idf: f64, tf: f64, doc_len: f64, avg_doc_len: f64, k1: f64, b: f64) -> f64 {
    let norm = if avg_doc_len > 0.0 { doc_len / avg_doc_len } else { 1.0 };
    idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * norm))
}

impl Bm25Index {
    pub fn build(corpus: &ParallelCorpus, k1: f64, b: f64) -> Result<Self, RetrievalError> {
        if corpus.is_empty() {
            return Err(RetrievalError::EmptyPool);
        }
        let doc_tokens: Vec<Vec<String>> = corpus.sources().map(tokenize_retrieval).collect();
        let mut postings: HashMap<String, Vec<(usize, u32)>> = HashMap::new();
        for (doc, tokens) in doc_tokens.iter().enumerate() {
            let mut tf: HashMap<&str, u32> = HashMap::new();
            for t in tokens {
                *tf.entry(t.as_str()).or_default() += 1;
            }
            for (term, count) in tf {
                postings.entry(term.to_string()).or_default().push((doc, count));
            }
        }
        for list in postings.values_mut() {
            list.sort_unstable_by_key(|&(doc, _)| doc);
        }
        let doc_freq = postings.iter().map(|(t, p)| (t.clone(), p.len())).collect();
        let total: usize = doc_tokens.iter().map(Vec::len).sum();
        let avg_doc_len = total as f64 / doc_tokens.len() as f64;
        Ok(Self {
            doc_tokens,
            doc_freq,
            postings,
            avg_doc_len,
            k1,
            b,
            eligible: corpus.targets().map(|t| !t.is_empty()).collect(),
        })
    }

    pub fn with_defaults(corpus: &ParallelCorpus) -> Result<Self, RetrievalError> {
        Self::build(corpus, DEFAULT_K1, DEFAULT_B)
    }

    pub fn n_docs(&self) -> usize {
        self.doc_tokens.len()
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.avg_doc_len
    }

    pub fn eligible(&self) -> &[bool] {
        &self.eligible
    }

    pub fn doc_tokens(&self) -> &[Vec<String>] {
        &self.doc_tokens
    }

    pub fn params(&self) -> (f64, f64) {
        (self.k1, self.b)
    }

    pub fn idf(&self, term: &str) -> f64 {
        let n = self.n_docs() as f64;
        let df = self.doc_freq(term) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// BM25 score of every pool document for `query`.
    pub fn scores(&self, query: &str) -> Vec<f64> {
        let mut scores = vec![0.0; self.n_docs()];
        let mut seen = std::collections::HashSet::new();
        for term in tokenize_retrieval(query) {
            if !seen.insert(term.clone()) {
                continue;
            }
            let Some(list) = self.postings.get(&term) else { continue };
            let idf = self.idf(&term);
            for &(doc, tf) in list {
                let dl = self.doc_tokens[doc].len() as f64;
                scores[doc] += term_weight(idf, tf as f64, dl, self.avg_doc_len, self.k1, self.b);
            }
        }
        scores
    }

    pub fn top_k(&self, query: &str, k: usize) -> Vec<ScoredCandidate> {
        if k == 0 || tokenize_retrieval(query).is_empty() {
            return Vec::new();
        }
        rank_candidates(&self.scores(query), &self.eligible, k)
    }
}

impl Retriever for Bm25Index {
    fn top_k(&self, query: &str, k: usize) -> Result<Vec<ScoredCandidate>, RetrievalError> {
        Ok(Bm25Index::top_k(self, query, k))
    }
}

pub fn build_bm25_index(corpus: &ParallelCorpus, k1: f64, b: f64) -> Result<Bm25Index, RetrievalError> {
    Bm25Index::build(corpus, k1, b)
}

pub fn bm25_top_k(index: &Bm25Index, query: &str, k: usize) -> Vec<ScoredCandidate> {
    index.top_k(query, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::LanguageTag;

    fn pool(docs: &[(&str, &str)]) -> ParallelCorpus {
        ParallelCorpus::from_pairs(
            docs.iter().copied(),
            LanguageTag::from_code("eng_Latn").unwrap(),
            LanguageTag::from_code("amh_Ethi").unwrap(),
        )
        .unwrap()
    }

    fn cats() -> ParallelCorpus {
        pool(&[("the cat sat", "a"), ("the dog sat", "b"), ("cats and dogs", "c")])
    }

    #[test]
    fn document_frequencies() {
        let idx = build_bm25_index(&cats(), DEFAULT_K1, DEFAULT_B).unwrap();
        assert_eq!(idx.doc_freq("the"), 2);
        assert_eq!(idx.doc_freq("sat"), 2);
        assert_eq!(idx.doc_freq("cat"), 1);
        assert_eq!(idx.n_docs(), 3);
        assert_eq!(idx.avg_doc_len(), 3.0);
    }

    #[test]
    fn cat_query_hand_values() {
        // N=3, all |d|=3=avgdl → tf norm = 2.5/2.5 = 1, score = Σ idf.
        // idf(the) = ln(1 + 1.5/2.5) = ln 1.6, idf(cat) = ln(1 + 2.5/1.5) = ln(8/3)
        let idx = Bm25Index::with_defaults(&cats()).unwrap();
        let s = idx.scores("the cat");
        assert!((s[0] - (1.6f64.ln() + (8.0f64 / 3.0).ln())).abs() < 1e-12);
        assert!((s[1] - 1.6f64.ln()).abs() < 1e-12);
        assert_eq!(s[2], 0.0);
        let top = bm25_top_k(&idx, "the cat", 1);
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].pool_id, 0);
    }

    #[test]
    fn empty_pool_and_query() {
        let empty = ParallelCorpus::from_pairs(
            Vec::<(&str, &str)>::new(),
            LanguageTag::from_code("eng_Latn").unwrap(),
            LanguageTag::from_code("amh_Ethi").unwrap(),
        )
        .unwrap();
        assert!(matches!(Bm25Index::with_defaults(&empty), Err(RetrievalError::EmptyPool)));
        let idx = Bm25Index::with_defaults(&cats()).unwrap();
        assert!(idx.top_k("", 3).is_empty());
        assert!(idx.top_k("...", 3).is_empty());
    }

    #[test]
    fn empty_targets_are_ineligible() {
        let idx = Bm25Index::with_defaults(&pool(&[("a", "x"), ("a", ""), ("a", "y")])).unwrap();
        assert_eq!(idx.eligible(), &[true, false, true]);
        let ids: Vec<_> = idx.top_k("a", 3).iter().map(|c| c.pool_id).collect();
        assert_eq!(ids, vec![0, 2]);
    }

    #[test]
    fn zero_scores_fill_by_ascending_id() {
        let idx = Bm25Index::with_defaults(&cats()).unwrap();
        let ids: Vec<_> = idx.top_k("dogs", 3).iter().map(|c| c.pool_id).collect();
        assert_eq!(ids, vec![2, 0, 1]);
    }

    #[test]
    fn exact_text_query_ranks_itself_first() {
        let p = pool(&[
            ("alpha beta gamma", "t"),
            ("delta epsilon zeta", "t"),
            ("eta theta iota kappa", "t"),
            ("alpha delta eta", "t"),
        ]);
        let idx = Bm25Index::with_defaults(&p).unwrap();
        for (j, pair) in p.pairs().iter().enumerate() {
            assert_eq!(idx.top_k(&pair.source, 1)[0].pool_id, j);
        }
    }

    #[test]
    fn duplicate_query_terms_count_once() {
        let idx = Bm25Index::with_defaults(&cats()).unwrap();
        assert_eq!(idx.scores("cat cat the"), idx.scores("the cat"));
    }
}
