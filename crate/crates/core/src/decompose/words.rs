use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

use crate::retrieval::tokenize_retrieval;

const EMBEDDED_STOPWORDS: &str = include_str!("../../assets/stopwords_en.txt");

/// Lowercase stop-word set; one token per line on disk.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords {
    words: HashSet<String>,
}

impl StopWords {
    pub fn english() -> Self {
        Self::parse(EMBEDDED_STOPWORDS)
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn parse(text: &str) -> Self {
        Self::from_words(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')))
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self { words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect() }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Retrieval tokens minus stop words, first occurrence kept. When nothing
/// survives, all (deduplicated) tokens are returned instead.
pub fn content_words(sentence: &str, stopwords: &StopWords) -> Vec<String> {
    let tokens = tokenize_retrieval(sentence);
    let keep = |filter: bool| {
        let mut seen = HashSet::new();
        tokens
            .iter()
            .filter(|t| !(filter && stopwords.contains(t)))
            .filter(|t| seen.insert(t.as_str()))
            .cloned()
            .collect::<Vec<_>>()
    };
    let words = keep(true);
    if words.is_empty() {
        keep(false)
    } else {
        words
    }
}
