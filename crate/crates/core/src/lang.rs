//! Language identity: FLORES-style codes, display names and writing scripts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const LANGUAGE_TABLE: &str = include_str!("../assets/languages.tsv");

/// Writing systems the built-in script heuristic can tell apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Script {
    Latin,
    Ethiopic,
    Myanmar,
    Khmer,
    Lao,
    Sinhala,
    Arabic,
    Cyrillic,
    Han,
    Other,
}

impl Script {
    pub const ALL: [Script; 10] = [
        Script::Latin,
        Script::Ethiopic,
        Script::Myanmar,
        Script::Khmer,
        Script::Lao,
        Script::Sinhala,
        Script::Arabic,
        Script::Cyrillic,
        Script::Han,
        Script::Other,
    ];

    /// Maps an ISO 15924 code (the suffix of a FLORES code) to a script.
    pub fn from_iso15924(code: &str) -> Script {
        match code {
            "Latn" => Script::Latin,
            "Ethi" => Script::Ethiopic,
            "Mymr" => Script::Myanmar,
            "Khmr" => Script::Khmer,
            "Laoo" => Script::Lao,
            "Sinh" => Script::Sinhala,
            "Arab" => Script::Arabic,
            "Cyrl" => Script::Cyrillic,
            "Hans" | "Hant" | "Hani" => Script::Han,
            _ => Script::Other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Script::Latin => "Latin",
            Script::Ethiopic => "Ethiopic",
            Script::Myanmar => "Myanmar",
            Script::Khmer => "Khmer",
            Script::Lao => "Lao",
            Script::Sinhala => "Sinhala",
            Script::Arabic => "Arabic",
            Script::Cyrillic => "Cyrillic",
            Script::Han => "Han",
            Script::Other => "Other",
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Script {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Script::ALL
            .iter()
            .copied()
            .find(|script| script.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown script {s:?}"))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LanguageError {
    #[error("language code must not be empty")]
    EmptyCode,
    #[error("unknown language code {0:?}")]
    UnknownCode(String),
}

/// A language as used throughout the pipeline, e.g. `amh_Ethi` / "Amharic".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LanguageTag {
    pub code: String,
    pub display_name: String,
    pub script: Script,
}

impl LanguageTag {
    /// Builds a tag with an explicit display name. The script is derived from
    /// the code's `_Xxxx` suffix when present.
    pub fn new(code: &str, display_name: &str) -> Result<Self, LanguageError> {
        let code = code.trim();
        if code.is_empty() {
            return Err(LanguageError::EmptyCode);
        }
        Ok(Self { code: code.to_string(), display_name: display_name.to_string(), script: script_from_code(code) })
    }

    /// Looks the code up in the embedded FLORES table.
    pub fn from_code(code: &str) -> Result<Self, LanguageError> {
        let code = code.trim();
        if code.is_empty() {
            return Err(LanguageError::EmptyCode);
        }
        let name = language_table().get(code).ok_or_else(|| LanguageError::UnknownCode(code.to_string()))?;
        Self::new(code, name)
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.display_name, self.code)
    }
}

pub fn script_from_code(code: &str) -> Script {
    match code.rsplit_once('_') {
        Some((_, suffix)) => Script::from_iso15924(suffix),
        None => Script::Other,
    }
}

/// Code → display name for every language shipped in the embedded table.
pub fn language_table() -> &'static BTreeMap<String, String> {
    static TABLE: OnceLock<BTreeMap<String, String>> = OnceLock::new();
    TABLE.get_or_init(|| {
        LANGUAGE_TABLE
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .filter_map(|l| l.split_once('\t'))
            .map(|(code, name)| (code.trim().to_string(), name.trim().to_string()))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_follows_code_suffix() {
        let amh = LanguageTag::from_code("amh_Ethi").unwrap();
        assert_eq!(amh.display_name, "Amharic");
        assert_eq!(amh.script, Script::Ethiopic);
        assert_eq!(script_from_code("zho_Hant"), Script::Han);
        assert_eq!(script_from_code("hin_Deva"), Script::Other);
        assert_eq!(script_from_code("english"), Script::Other);
    }

    #[test]
    fn unknown_and_empty_codes() {
        assert_eq!(LanguageTag::from_code("xxx_Zzzz"), Err(LanguageError::UnknownCode("xxx_Zzzz".into())));
        assert_eq!(LanguageTag::new("  ", "x"), Err(LanguageError::EmptyCode));
    }

    #[test]
    fn table_covers_evaluated_directions() {
        for code in [
            "eng_Latn", "amh_Ethi", "mya_Mymr", "fij_Latn", "khm_Khmr", "lao_Laoo", "smo_Latn", "sin_Sinh", "tso_Latn",
            "tuk_Latn", "uig_Arab",
        ] {
            assert!(LanguageTag::from_code(code).is_ok(), "{code}");
        }
    }
}
