//! Parallel corpora (selection pools and evaluation sets) and dependency trees.

mod conllu;

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crate::lang::{LanguageTag, Script};
pub use conllu::{load_dependency_trees, parse_dependency_trees, DependencyToken, DependencyTree};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("line count mismatch: {0} source lines, {1} target lines")]
    LineCountMismatch(usize, usize),
    #[error("malformed record at line {0}")]
    MalformedRecord(usize),
    #[error("empty source sentence at line {0}")]
    EmptySource(usize),
    #[error("aligned_text needs a target file")]
    MissingTargetFile,
    #[error("malformed CoNLL-U at line {0}")]
    MalformedConllu(usize),
    #[error("block {0} has more than one root")]
    MultipleRoots(usize),
    #[error("block {0} has no root")]
    NoRoot(usize),
    #[error("block {0} has a head cycle")]
    HeadCycle(usize),
    #[error("sentence id {0} bound to more than one tree")]
    DuplicateTree(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// On-disk layout of a parallel corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFormat {
    /// Two files, one sentence per line.
    AlignedText,
    /// `source<TAB>target` per line.
    Tsv,
    /// One `{"source": .., "target": ..}` object per line.
    Jsonl,
}

impl CorpusFormat {
    /// Guesses the format from a file extension; anything unknown is aligned text.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") => CorpusFormat::Tsv,
            Some("jsonl") => CorpusFormat::Jsonl,
            _ => CorpusFormat::AlignedText,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aligned_text" | "aligned" | "text" => Ok(CorpusFormat::AlignedText),
            "tsv" => Ok(CorpusFormat::Tsv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub id: usize,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelCorpus {
    pairs: Vec<SentencePair>,
    pub src: LanguageTag,
    pub tgt: LanguageTag,
}

impl ParallelCorpus {
    /// Builds a corpus from `(source, target)` tuples. Sentences are trimmed and
    /// ids assigned by position.
    pub fn from_pairs<I, S, T>(pairs: I, src: LanguageTag, tgt: LanguageTag) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let pairs = pairs
            .into_iter()
            .enumerate()
            .map(|(id, (s, t))| {
                let source = s.as_ref().trim().to_string();
                if source.is_empty() {
                    return Err(CorpusError::EmptySource(id + 1));
                }
                Ok(SentencePair { id, source, target: t.as_ref().trim().to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { pairs, src, tgt })
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn get(&self, id: usize) -> Option<&SentencePair> {
        self.pairs.get(id)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|p| p.source.as_str())
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|p| p.target.as_str())
    }

    /// Writes `source<TAB>target` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for pair in &self.pairs {
            writeln!(out, "{}\t{}", pair.source, pair.target)?;
        }
        Ok(())
    }
}

/// Informational counts over a corpus. Empty targets are warnings, not errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub total: usize,
    pub empty_targets: usize,
    pub duplicate_sources: usize,
}

impl ValidationReport {
    pub fn has_warnings(&self) -> bool {
        self.empty_targets > 0 || self.duplicate_sources > 0
    }
}

pub fn validate_corpus(corpus: &ParallelCorpus) -> ValidationReport {
    let mut seen = HashSet::new();
    let mut report = ValidationReport { total: corpus.len(), ..Default::default() };
    for pair in corpus.pairs() {
        if pair.target.is_empty() {
            report.empty_targets += 1;
        }
        if !seen.insert(pair.source.as_str()) {
            report.duplicate_sources += 1;
        }
    }
    report
}

fn read_file(path: &Path) -> Result<String, CorpusError> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Err(CorpusError::MissingFile(path.to_path_buf())),
        Err(e) => Err(e.into()),
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    source: String,
    target: String,
}

/// Loads a corpus. For `AlignedText` the target file may be omitted, in which
/// case every target is empty (source-only evaluation sets).
pub fn load_parallel_corpus(
    source_path: &Path,
    target_path: Option<&Path>,
    format: CorpusFormat,
    src: LanguageTag,
    tgt: LanguageTag,
) -> Result<ParallelCorpus, CorpusError> {
    let text = read_file(source_path)?;
    let raw: Vec<(String, String)> = match format {
        CorpusFormat::AlignedText => {
            let sources: Vec<&str> = text.lines().collect();
            match target_path {
                Some(tp) => {
                    let tgt_text = read_file(tp)?;
                    let targets: Vec<&str> = tgt_text.lines().collect();
                    if sources.len() != targets.len() {
                        return Err(CorpusError::LineCountMismatch(sources.len(), targets.len()));
                    }
                    sources.into_iter().zip(targets).map(|(s, t)| (s.to_string(), t.to_string())).collect()
                }
                None => sources.into_iter().map(|s| (s.to_string(), String::new())).collect(),
            }
        }
        CorpusFormat::Tsv => text
            .lines()
            .enumerate()
            .map(|(i, line)| {
                let mut cols = line.split('\t');
                match (cols.next(), cols.next(), cols.next()) {
                    (Some(s), Some(t), None) => Ok((s.to_string(), t.to_string())),
                    _ => Err(CorpusError::MalformedRecord(i + 1)),
                }
            })
            .collect::<Result<_, _>>()?,
        CorpusFormat::Jsonl => text
            .lines()
            .enumerate()
            .filter(|(_, line)| !line.trim().is_empty())
            .map(|(i, line)| {
                serde_json::from_str::<JsonRecord>(line)
                    .map(|r| (r.source, r.target))
                    .map_err(|_| CorpusError::MalformedRecord(i + 1))
            })
            .collect::<Result<_, _>>()?,
    };
    ParallelCorpus::from_pairs(raw, src, tgt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn langs() -> (LanguageTag, LanguageTag) {
        (LanguageTag::from_code("eng_Latn").unwrap(), LanguageTag::from_code("amh_Ethi").unwrap())
    }

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn aligned_text_assigns_positional_ids() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(&dir, "a.en", "one\n two \nthree\n");
        let t = write(&dir, "a.am", "አንድ\nሁለት\nሶስት\n");
        let (src, tgt) = langs();
        let c = load_parallel_corpus(&s, Some(&t), CorpusFormat::AlignedText, src, tgt).unwrap();
        assert_eq!(c.pairs().iter().map(|p| p.id).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(c.pairs()[1].source, "two");
    }

    #[test]
    fn aligned_text_line_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(&dir, "a.en", &"s\n".repeat(997));
        let t = write(&dir, "a.am", &"t\n".repeat(996));
        let (src, tgt) = langs();
        let err = load_parallel_corpus(&s, Some(&t), CorpusFormat::AlignedText, src, tgt);
        assert!(matches!(err, Err(CorpusError::LineCountMismatch(997, 996))));
    }

    #[test]
    fn jsonl_record() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(&dir, "c.jsonl", "{\"source\":\"Hi\",\"target\":\"Salut\"}\n");
        let (src, tgt) = langs();
        let c = load_parallel_corpus(&s, None, CorpusFormat::Jsonl, src, tgt).unwrap();
        assert_eq!(c.pairs()[0], SentencePair { id: 0, source: "Hi".into(), target: "Salut".into() });
    }

    #[test]
    fn jsonl_missing_key_is_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(&dir, "c.jsonl", "{\"source\":\"a\",\"target\":\"b\"}\n{\"source\":\"Hi\"}\n");
        let (src, tgt) = langs();
        let err = load_parallel_corpus(&s, None, CorpusFormat::Jsonl, src, tgt);
        assert!(matches!(err, Err(CorpusError::MalformedRecord(2))));
    }

    #[test]
    fn missing_file_and_empty_source() {
        let dir = tempfile::tempdir().unwrap();
        let (src, tgt) = langs();
        let err = load_parallel_corpus(&dir.path().join("nope.tsv"), None, CorpusFormat::Tsv, src.clone(), tgt.clone());
        assert!(matches!(err, Err(CorpusError::MissingFile(_))));

        let s = write(&dir, "c.tsv", "a\tb\n  \tc\n");
        let err = load_parallel_corpus(&s, None, CorpusFormat::Tsv, src.clone(), tgt.clone());
        assert!(matches!(err, Err(CorpusError::EmptySource(2))));

        let s = write(&dir, "d.tsv", "no tab here\n");
        let err = load_parallel_corpus(&s, None, CorpusFormat::Tsv, src, tgt);
        assert!(matches!(err, Err(CorpusError::MalformedRecord(1))));
    }

    #[test]
    fn validation_counts() {
        let (src, tgt) = langs();
        let c = ParallelCorpus::from_pairs([("a", "x"), ("b", "y")], src.clone(), tgt.clone()).unwrap();
        assert_eq!(validate_corpus(&c), ValidationReport { total: 2, empty_targets: 0, duplicate_sources: 0 });
        let c = ParallelCorpus::from_pairs([("a", "x"), ("b", "")], src.clone(), tgt.clone()).unwrap();
        assert_eq!(validate_corpus(&c).empty_targets, 1);
        let c = ParallelCorpus::from_pairs([("a", "x"), ("a", "y")], src, tgt).unwrap();
        assert_eq!(validate_corpus(&c).duplicate_sources, 1);
    }
}
