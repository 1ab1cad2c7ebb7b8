//! Output cleaning: repeating-bigram truncation and script-based filtering of
//! phrase translations.

mod bigrams;
mod script;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use bigrams::{truncate_repeating_bigrams, DEFAULT_BIGRAM_THRESHOLD};
pub use script::{char_script, identify_script, ProfileTableError, ScriptProfile, ScriptProfileTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    None,
    WrongLanguage,
    EmptyAfterClean,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhrasePair {
    pub phrase: String,
    pub translation: String,
    pub kept: bool,
    pub drop_reason: DropReason,
}

impl PhrasePair {
    pub fn new(phrase: impl Into<String>, translation: impl Into<String>) -> Self {
        Self { phrase: phrase.into(), translation: translation.into(), kept: true, drop_reason: DropReason::None }
    }

    fn drop(&mut self, reason: DropReason) {
        self.kept = false;
        self.drop_reason = reason;
    }
}

/// Cleans each translation, then annotates the pairs that cannot serve as
/// merge demonstrations. Checks run in this order: empty translation, wrong
/// script (supported profiles only), repeat of an already kept pair. Nothing
/// is removed or reordered and phrases are never touched.
pub fn filter_phrase_pairs(pairs: Vec<PhrasePair>, profile: &ScriptProfile) -> Vec<PhrasePair> {
    let mut kept: HashSet<(String, String)> = HashSet::new();
    pairs
        .into_iter()
        .map(|mut pair| {
            pair.translation = truncate_repeating_bigrams(&pair.translation, DEFAULT_BIGRAM_THRESHOLD);
            pair.kept = true;
            pair.drop_reason = DropReason::None;
            if pair.translation.trim().is_empty() {
                pair.drop(DropReason::EmptyAfterClean);
            } else if !profile.accepts(&pair.translation) {
                pair.drop(DropReason::WrongLanguage);
            } else if !kept.insert((pair.phrase.clone(), pair.translation.clone())) {
                pair.drop(DropReason::Duplicate);
            }
            pair
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Script;

    fn amharic() -> ScriptProfile {
        ScriptProfile::supported([Script::Ethiopic])
    }

    #[test]
    fn wrong_language_is_annotated() {
        let out = filter_phrase_pairs(vec![PhrasePair::new("Hello world.", "hello world")], &amharic());
        assert_eq!(out[0].drop_reason, DropReason::WrongLanguage);
        assert!(!out[0].kept);
    }

    #[test]
    fn unsupported_profile_skips_language_check() {
        let out = filter_phrase_pairs(vec![PhrasePair::new("a", "hello world")], &ScriptProfile::unsupported());
        assert!(out[0].kept);
        assert_eq!(out[0].drop_reason, DropReason::None);
    }

    #[test]
    fn duplicates_and_empties() {
        let pairs = vec![
            PhrasePair::new("The mice.", "አይጦቹ።"),
            PhrasePair::new("The mice.", "አይጦቹ።"),
            PhrasePair::new("They are.", "  "),
            PhrasePair::new("Other.", "አይጦቹ።"),
        ];
        let out = filter_phrase_pairs(pairs.clone(), &amharic());
        let reasons: Vec<DropReason> = out.iter().map(|p| p.drop_reason).collect();
        assert_eq!(reasons, [DropReason::None, DropReason::Duplicate, DropReason::EmptyAfterClean, DropReason::None]);
        for (a, b) in pairs.iter().zip(&out) {
            assert_eq!(a.phrase, b.phrase);
            assert_eq!(b.kept, b.drop_reason == DropReason::None);
        }
    }

    #[test]
    fn translations_are_truncated_before_checks() {
        let out = filter_phrase_pairs(vec![PhrasePair::new("p", "ሰላም ዓለም ".repeat(12))], &amharic());
        assert_eq!(out[0].translation, "ሰላም ዓለም");
        assert!(out[0].kept);
    }

    #[test]
    fn serde_names() {
        let json = serde_json::to_string(&PhrasePair::new("a", "b")).unwrap();
        assert_eq!(json, r#"{"phrase":"a","translation":"b","kept":true,"drop_reason":"none"}"#);
    }
}
