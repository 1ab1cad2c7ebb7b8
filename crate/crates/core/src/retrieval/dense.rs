//! Cosine-similarity retrieval over externally supplied sentence embeddings.

use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{rank_all, RetrievalError, Retriever, ScoredCandidate};

/// Produces embedding vectors for texts (an HTTP service, or a test double).
pub trait Embedder: Send + Sync {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, RetrievalError>;
}

/// Unit-normalized pool vectors.
#[derive(Debug, Clone)]
pub struct CosineIndex {
    vectors: Vec<Vec<f64>>,
    eligible: Vec<bool>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl CosineIndex {
    /// `eligible` marks pool entries usable as demonstrations; `None` keeps all.
    pub fn new(vectors: Vec<Vec<f64>>, eligible: Option<Vec<bool>>) -> Result<Self, RetrievalError> {
        if vectors.is_empty() {
            return Err(RetrievalError::EmptyPool);
        }
        let dim = vectors[0].len();
        let mut normalized = Vec::with_capacity(vectors.len());
        for (i, v) in vectors.into_iter().enumerate() {
            if v.len() != dim {
                return Err(RetrievalError::DimensionMismatch { expected: dim, found: v.len() });
            }
            let n = norm(&v);
            if n == 0.0 || !n.is_finite() {
                return Err(RetrievalError::ZeroVector(i));
            }
            normalized.push(v.into_iter().map(|x| x / n).collect());
        }
        let eligible = eligible.unwrap_or_else(|| vec![true; normalized.len()]);
        if eligible.len() != normalized.len() {
            return Err(RetrievalError::PoolSizeMismatch { vectors: normalized.len(), pool: eligible.len() });
        }
        Ok(Self { vectors: normalized, eligible })
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Ranks the whole eligible pool by cosine similarity; negative scores rank last.
    pub fn top_k(&self, query_vec: &[f64], k: usize) -> Result<Vec<ScoredCandidate>, RetrievalError> {
        if query_vec.len() != self.dim() {
            return Err(RetrievalError::DimensionMismatch { expected: self.dim(), found: query_vec.len() });
        }
        let qn = norm(query_vec);
        if qn == 0.0 || !qn.is_finite() {
            return Err(RetrievalError::ZeroQuery);
        }
        let scores: Vec<f64> =
            self.vectors.iter().map(|v| v.iter().zip(query_vec).map(|(a, b)| a * b).sum::<f64>() / qn).collect();
        Ok(rank_all(&scores, &self.eligible, k))
    }
}

pub fn cosine_top_k(vectors: &[Vec<f64>], query_vec: &[f64], k: usize) -> Result<Vec<ScoredCandidate>, RetrievalError> {
    CosineIndex::new(vectors.to_vec(), None)?.top_k(query_vec, k)
}

/// Text retriever: embeds the query, then ranks by cosine similarity.
pub struct CosineRetriever {
    index: CosineIndex,
    embedder: Box<dyn Embedder>,
}

impl CosineRetriever {
    pub fn new(index: CosineIndex, embedder: Box<dyn Embedder>) -> Self {
        Self { index, embedder }
    }
}

impl Retriever for CosineRetriever {
    fn top_k(&self, query: &str, k: usize) -> Result<Vec<ScoredCandidate>, RetrievalError> {
        if query.trim().is_empty() || k == 0 {
            return Ok(Vec::new());
        }
        let mut vecs = self.embedder.embed(&[query.to_string()])?;
        let q = vecs.pop().ok_or_else(|| RetrievalError::Embedding("empty embedding response".into()))?;
        self.index.top_k(&q, k)
    }
}

/// Reads a matrix file: a `n_docs dim` header line, then one row of `dim`
/// whitespace-separated decimals per document.
pub fn load_embedding_matrix(path: &Path) -> Result<Vec<Vec<f64>>, RetrievalError> {
    let text = fs::read_to_string(path)?;
    parse_embedding_matrix(&text)
}

pub fn parse_embedding_matrix(text: &str) -> Result<Vec<Vec<f64>>, RetrievalError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(RetrievalError::MalformedMatrix(1))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| RetrievalError::MalformedMatrix(1)))
        .collect::<Result<_, _>>()?;
    let [n_docs, dim] = dims[..] else {
        return Err(RetrievalError::MalformedMatrix(1));
    };
    let mut rows = Vec::with_capacity(n_docs);
    for (i, line) in lines {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| RetrievalError::MalformedMatrix(i + 1)))
            .collect::<Result<_, _>>()?;
        if row.len() != dim {
            return Err(RetrievalError::DimensionMismatch { expected: dim, found: row.len() });
        }
        rows.push(row);
    }
    if rows.len() != n_docs {
        return Err(RetrievalError::MalformedMatrix(rows.len() + 2));
    }
    Ok(rows)
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    input: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    embeddings: Vec<Vec<f64>>,
}

/// `POST {"input": [texts]}` → `{"embeddings": [[...]]}`.
pub struct HttpEmbedder {
    url: String,
    client: reqwest::blocking::Client,
}

impl HttpEmbedder {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Result<Self, RetrievalError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| RetrievalError::Embedding(e.to_string()))?;
        Ok(Self { url: url.into(), client })
    }
}

impl Embedder for HttpEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, RetrievalError> {
        let resp = self
            .client
            .post(&self.url)
            .json(&EmbedRequest { input: texts })
            .send()
            .and_then(|r| r.error_for_status())
            .map_err(|e| RetrievalError::Embedding(e.to_string()))?;
        let body: EmbedResponse = resp.json().map_err(|e| RetrievalError::Embedding(e.to_string()))?;
        if body.embeddings.len() != texts.len() {
            return Err(RetrievalError::Embedding(format!(
                "asked for {} embeddings, got {}",
                texts.len(),
                body.embeddings.len()
            )));
        }
        Ok(body.embeddings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_similarity_is_one() {
        let pool = vec![vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 0.0], vec![0.0, 0.0, 4.0]];
        let r = cosine_top_k(&pool, &[1.0, 2.0, 3.0], 1).unwrap();
        assert_eq!(r[0].pool_id, 0);
        assert!((r[0].score - 1.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_query_scores_zero() {
        let pool = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let r = cosine_top_k(&pool, &[0.0, 0.0, 2.0], 5).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|c| c.score == 0.0));
        assert_eq!(r[0].pool_id, 0);
    }

    #[test]
    fn hand_dot_products() {
        let pool = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let r = cosine_top_k(&pool, &[0.6, 0.8], 2).unwrap();
        assert_eq!(r[0].pool_id, 1);
        assert!((r[0].score - 0.8).abs() < 1e-12);
        assert_eq!(r[1].pool_id, 0);
        assert!((r[1].score - 0.6).abs() < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(cosine_top_k(&[vec![1.0, 0.0]], &[1.0], 1), Err(RetrievalError::DimensionMismatch { .. })));
        assert!(matches!(
            cosine_top_k(&[vec![1.0, 0.0], vec![0.0, 0.0]], &[1.0, 0.0], 1),
            Err(RetrievalError::ZeroVector(1))
        ));
        assert!(matches!(cosine_top_k(&[vec![1.0]], &[0.0], 1), Err(RetrievalError::ZeroQuery)));
    }

    #[test]
    fn matrix_file_format() {
        let m = parse_embedding_matrix("2 3\n1 0 0\n0.5 0.25 -1e-1\n").unwrap();
        assert_eq!(m, vec![vec![1.0, 0.0, 0.0], vec![0.5, 0.25, -0.1]]);
        assert!(parse_embedding_matrix("3 3\n1 0 0\n").is_err());
        assert!(parse_embedding_matrix("1 2\n1 0 0\n").is_err());
    }
}
