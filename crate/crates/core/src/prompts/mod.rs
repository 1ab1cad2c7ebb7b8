//! Prompt templates (zero-shot, few-shot, divide, paraphrase, merge) and the
//! parser for numbered decomposition output.
//!
//! Templates use `{name}` placeholders, substituted in a single pass so that
//! braces inside sentences are never re-expanded:
//!
//! | template         | placeholders                                   |
//! |------------------|------------------------------------------------|
//! | `zero_shot.txt`  | `{src}` `{tgt}` `{sentence}`                   |
//! | `few_shot.txt`   | `{src}` `{tgt}` `{sentence}` `{demonstrations}`|
//! | `merge.txt`      | same as `few_shot.txt`                         |
//! | `divide.txt`     | `{sentence}`                                   |
//! | `paraphrase.txt` | `{sentence}`                                   |

mod parse;

use std::borrow::Cow;
use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use crate::lang::LanguageTag;

pub use parse::{parse_propositions, DEFAULT_PHRASE_CAP};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("sentence to translate is empty")]
    EmptySentence,
    #[error("demonstration {0} has an empty source or target")]
    EmptyDemoField(usize),
    #[error("no numbered propositions found in model output")]
    NoPropositionsFound,
    #[error("cannot read prompt template {0}")]
    Template(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demonstration {
    pub source: String,
    pub target: String,
}

impl Demonstration {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self { source: source.into(), target: target.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    ZeroShot,
    FewShot,
    Divide,
    Paraphrase,
    Merge,
}

impl PromptKind {
    pub fn file_name(self) -> &'static str {
        match self {
            PromptKind::ZeroShot => "zero_shot.txt",
            PromptKind::FewShot => "few_shot.txt",
            PromptKind::Divide => "divide.txt",
            PromptKind::Paraphrase => "paraphrase.txt",
            PromptKind::Merge => "merge.txt",
        }
    }
}

/// Which divide template to use for LLM decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivideMode {
    Propositions,
    Paraphrase,
}

const ZERO_SHOT: &str = include_str!("../../assets/prompts/zero_shot.txt");
const FEW_SHOT: &str = include_str!("../../assets/prompts/few_shot.txt");
const DIVIDE: &str = include_str!("../../assets/prompts/divide.txt");
const PARAPHRASE: &str = include_str!("../../assets/prompts/paraphrase.txt");

/// The active template set. `merge` is `None` unless overridden, in which case
/// merge prompts render through the few-shot template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptSet {
    zero_shot: String,
    few_shot: String,
    divide: String,
    paraphrase: String,
    merge: Option<String>,
}

impl Default for PromptSet {
    fn default() -> Self {
        Self::embedded()
    }
}

fn strip_one_newline(s: &str) -> &str {
    s.strip_suffix('\n').map(|s| s.strip_suffix('\r').unwrap_or(s)).unwrap_or(s)
}

impl PromptSet {
    pub fn embedded() -> Self {
        Self {
            zero_shot: strip_one_newline(ZERO_SHOT).to_string(),
            few_shot: strip_one_newline(FEW_SHOT).to_string(),
            divide: strip_one_newline(DIVIDE).to_string(),
            paraphrase: strip_one_newline(PARAPHRASE).to_string(),
            merge: None,
        }
    }

    /// Loads overrides from `dir`; files that are absent keep the embedded text.
    /// One trailing newline is dropped from each file.
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut set = Self::embedded();
        let read = |kind: PromptKind| -> Result<Option<String>, PromptError> {
            let path = dir.join(kind.file_name());
            if !path.exists() {
                return Ok(None);
            }
            fs::read_to_string(&path)
                .map(|t| Some(strip_one_newline(&t).to_string()))
                .map_err(|e| PromptError::Template(format!("{}: {e}", path.display())))
        };
        if let Some(t) = read(PromptKind::ZeroShot)? {
            set.zero_shot = t;
        }
        if let Some(t) = read(PromptKind::FewShot)? {
            set.few_shot = t;
        }
        if let Some(t) = read(PromptKind::Divide)? {
            set.divide = t;
        }
        if let Some(t) = read(PromptKind::Paraphrase)? {
            set.paraphrase = t;
        }
        set.merge = read(PromptKind::Merge)?;
        Ok(set)
    }

    pub fn template(&self, kind: PromptKind) -> &str {
        match kind {
            PromptKind::ZeroShot => &self.zero_shot,
            PromptKind::FewShot => &self.few_shot,
            PromptKind::Divide => &self.divide,
            PromptKind::Paraphrase => &self.paraphrase,
            PromptKind::Merge => self.merge.as_deref().unwrap_or(&self.few_shot),
        }
    }

    /// Zero-shot prompt when `demos` is empty, few-shot otherwise.
    pub fn render_translate(
        &self,
        tgt: &LanguageTag,
        src: &LanguageTag,
        sentence: &str,
        demos: &[Demonstration],
    ) -> Result<String, PromptError> {
        let kind = if demos.is_empty() { PromptKind::ZeroShot } else { PromptKind::FewShot };
        self.render_with_demos(kind, tgt, src, sentence, demos)
    }

    /// Merge prompt: the phrase/translation pairs act as demonstrations.
    pub fn render_merge(
        &self,
        tgt: &LanguageTag,
        src: &LanguageTag,
        sentence: &str,
        pairs: &[Demonstration],
    ) -> Result<String, PromptError> {
        self.render_with_demos(PromptKind::Merge, tgt, src, sentence, pairs)
    }

    fn render_with_demos(
        &self,
        kind: PromptKind,
        tgt: &LanguageTag,
        src: &LanguageTag,
        sentence: &str,
        demos: &[Demonstration],
    ) -> Result<String, PromptError> {
        if sentence.trim().is_empty() {
            return Err(PromptError::EmptySentence);
        }
        for (i, d) in demos.iter().enumerate() {
            if d.source.trim().is_empty() || d.target.trim().is_empty() {
                return Err(PromptError::EmptyDemoField(i));
            }
        }
        let blocks = format_demonstrations(tgt, src, demos);
        let vars = HashMap::from([
            ("src", src.display_name.as_str()),
            ("tgt", tgt.display_name.as_str()),
            ("sentence", sentence),
            ("demonstrations", blocks.as_str()),
        ]);
        Ok(fill(self.template(kind), &vars))
    }

    pub fn render_divide(&self, sentence: &str, mode: DivideMode) -> Result<String, PromptError> {
        if sentence.trim().is_empty() {
            return Err(PromptError::EmptySentence);
        }
        let kind = match mode {
            DivideMode::Propositions => PromptKind::Divide,
            DivideMode::Paraphrase => PromptKind::Paraphrase,
        };
        Ok(fill(self.template(kind), &HashMap::from([("sentence", sentence)])))
    }
}

/// Numbered blocks separated by a blank line:
/// `N. {src} sentence\n{source}\n{tgt} translation\n{target}`.
pub fn format_demonstrations(tgt: &LanguageTag, src: &LanguageTag, demos: &[Demonstration]) -> String {
    demos
        .iter()
        .enumerate()
        .map(|(i, d)| {
            format!(
                "{}. {} sentence\n{}\n{} translation\n{}",
                i + 1,
                src.display_name,
                d.source,
                tgt.display_name,
                d.target
            )
        })
        .collect::<Vec<_>>()
        .join("\n\n")
}

fn fill(template: &str, vars: &HashMap<&str, &str>) -> String {
    static PLACEHOLDER: OnceLock<Regex> = OnceLock::new();
    let re = PLACEHOLDER.get_or_init(|| Regex::new(r"\{([a-z_]+)\}").expect("valid regex"));
    let out: Cow<str> = re.replace_all(template, |caps: &Captures| match vars.get(&caps[1]) {
        Some(v) => v.to_string(),
        None => caps[0].to_string(),
    });
    out.into_owned()
}

pub fn render_translate_prompt(
    tgt: &LanguageTag,
    src: &LanguageTag,
    sentence: &str,
    demos: &[Demonstration],
) -> Result<String, PromptError> {
    PromptSet::embedded().render_translate(tgt, src, sentence, demos)
}

pub fn render_divide_prompt(sentence: &str, mode: DivideMode) -> Result<String, PromptError> {
    PromptSet::embedded().render_divide(sentence, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn langs() -> (LanguageTag, LanguageTag) {
        (LanguageTag::from_code("amh_Ethi").unwrap(), LanguageTag::from_code("eng_Latn").unwrap())
    }

    #[test]
    fn zero_shot_layout() {
        let (tgt, src) = langs();
        let p = render_translate_prompt(&tgt, &src, "Hello.", &[]).unwrap();
        assert_eq!(
            p,
            "Please write a high-quality Amharic translation of the following English sentence\n\nHello.\n\nPlease provide only the translation, nothing more."
        );
    }

    #[test]
    fn empty_demo_field() {
        let (tgt, src) = langs();
        let demos = [Demonstration::new("a", "b"), Demonstration::new("c", " ")];
        assert_eq!(render_translate_prompt(&tgt, &src, "x", &demos), Err(PromptError::EmptyDemoField(1)));
        assert_eq!(render_translate_prompt(&tgt, &src, " ", &[]), Err(PromptError::EmptySentence));
    }

    #[test]
    fn braces_in_sentence_are_not_expanded() {
        let (tgt, src) = langs();
        let p = render_translate_prompt(&tgt, &src, "say {tgt} and {}", &[]).unwrap();
        assert!(p.contains("\n\nsay {tgt} and {}\n\n"));
    }

    #[test]
    fn merge_equals_few_shot() {
        let (tgt, src) = langs();
        let pairs = [Demonstration::new("The mice are non-diabetic.", "አይጦቹ")];
        let set = PromptSet::embedded();
        assert_eq!(
            set.render_merge(&tgt, &src, "s", &pairs).unwrap(),
            set.render_translate(&tgt, &src, "s", &pairs).unwrap()
        );
    }

    #[test]
    fn divide_modes() {
        let a = render_divide_prompt("A sentence.", DivideMode::Propositions).unwrap();
        assert!(a.contains("Boolean satisfiability problem"));
        assert!(a.ends_with("###\n\nSentence\nA sentence."));
        let b = render_divide_prompt("A sentence.", DivideMode::Paraphrase).unwrap();
        assert!(b.contains("provide four paraphrases"));
        assert_eq!(a, render_divide_prompt("A sentence.", DivideMode::Propositions).unwrap());
    }

    #[test]
    fn overrides_from_dir() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("zero_shot.txt"), "To {tgt}: {sentence}\n").unwrap();
        fs::write(dir.path().join("merge.txt"), "MERGE {demonstrations} -> {sentence}").unwrap();
        let set = PromptSet::from_dir(dir.path()).unwrap();
        let (tgt, src) = langs();
        assert_eq!(set.render_translate(&tgt, &src, "hi", &[]).unwrap(), "To Amharic: hi");
        let m = set.render_merge(&tgt, &src, "hi", &[Demonstration::new("a", "b")]).unwrap();
        assert_eq!(m, "MERGE 1. English sentence\na\nAmharic translation\nb -> hi");
        assert_eq!(set.template(PromptKind::Divide), PromptSet::embedded().template(PromptKind::Divide));
    }
}
