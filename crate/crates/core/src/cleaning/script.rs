use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::lang::{LanguageTag, Script};

const PROFILE_TABLE: &str = include_str!("../../assets/script_profiles.tsv");

/// Script of a single letter, by Unicode block.
pub fn char_script(c: char) -> Script {
    match c as u32 {
        0x41..=0x5A
        | 0x61..=0x7A
        | 0xC0..=0x24F
        | 0x250..=0x2AF
        | 0x1E00..=0x1EFF
        | 0x2C60..=0x2C7F
        | 0xA720..=0xA7FF
        | 0xAB30..=0xAB6F
        | 0xFF21..=0xFF3A
        | 0xFF41..=0xFF5A => Script::Latin,
        0x1200..=0x139F | 0x2D80..=0x2DDF | 0xAB00..=0xAB2F | 0x1E7E0..=0x1E7FF => Script::Ethiopic,
        0x1000..=0x109F | 0xA9E0..=0xA9FF | 0xAA60..=0xAA7F => Script::Myanmar,
        0x1780..=0x17FF | 0x19E0..=0x19FF => Script::Khmer,
        0x0E80..=0x0EFF => Script::Lao,
        0x0D80..=0x0DFF | 0x111E0..=0x111FF => Script::Sinhala,
        0x0600..=0x06FF | 0x0750..=0x077F | 0x0870..=0x08FF | 0xFB50..=0xFDFF | 0xFE70..=0xFEFF => Script::Arabic,
        0x0400..=0x052F | 0x1C80..=0x1C8F | 0x2DE0..=0x2DFF | 0xA640..=0xA69F => Script::Cyrillic,
        0x3005..=0x3007 | 0x3400..=0x4DBF | 0x4E00..=0x9FFF | 0xF900..=0xFAFF | 0x20000..=0x3134F => Script::Han,
        _ => Script::Other,
    }
}

/// Majority script of the letters in `text`. `Other` when there are no
/// letters, when no script reaches half of them, or when two scripts tie.
pub fn identify_script(text: &str) -> Script {
    let mut counts: BTreeMap<Script, usize> = BTreeMap::new();
    let mut letters = 0;
    for c in text.chars().filter(|c| c.is_alphabetic()) {
        *counts.entry(char_script(c)).or_default() += 1;
        letters += 1;
    }
    let Some(&top) = counts.values().max() else {
        return Script::Other;
    };
    let mut leaders = counts.iter().filter(|(_, &n)| n == top);
    match (leaders.next(), leaders.next()) {
        (Some((&script, _)), None) if 2 * top >= letters => script,
        _ => Script::Other,
    }
}

/// Scripts a target language is expected to be written in. An empty set
/// means the language cannot be checked and filtering is skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptProfile {
    pub expected_scripts: BTreeSet<Script>,
    pub supported: bool,
}

impl ScriptProfile {
    pub fn supported(scripts: impl IntoIterator<Item = Script>) -> Self {
        let expected_scripts: BTreeSet<Script> = scripts.into_iter().collect();
        let supported = !expected_scripts.is_empty();
        Self { expected_scripts, supported }
    }

    pub fn unsupported() -> Self {
        Self { expected_scripts: BTreeSet::new(), supported: false }
    }

    pub fn accepts(&self, text: &str) -> bool {
        !self.supported || self.expected_scripts.contains(&identify_script(text))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProfileTableError {
    #[error("script profile line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// `code<TAB>Script[,Script]` rows, `-` marking an unsupported language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptProfileTable {
    rows: BTreeMap<String, ScriptProfile>,
}

impl Default for ScriptProfileTable {
    fn default() -> Self {
        Self::embedded()
    }
}

impl ScriptProfileTable {
    pub fn embedded() -> Self {
        Self::parse(PROFILE_TABLE).expect("embedded script profile table is well formed")
    }

    pub fn load(path: &Path) -> Result<Self, ProfileTableError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ProfileTableError> {
        let mut rows = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |reason: String| ProfileTableError::Malformed { line: i + 1, reason };
            let (code, scripts) = line.split_once('\t').ok_or_else(|| malformed("expected code<TAB>scripts".into()))?;
            let profile = if scripts.trim() == "-" {
                ScriptProfile::unsupported()
            } else {
                let scripts = scripts
                    .split(',')
                    .map(|s| s.parse::<Script>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(malformed)?;
                ScriptProfile::supported(scripts)
            };
            rows.insert(code.trim().to_string(), profile);
        }
        Ok(Self { rows })
    }

    /// Listed languages use their row. Others are checked by the script in
    /// their code when it is a modelled non-Latin script, and skipped otherwise.
    pub fn profile(&self, tag: &LanguageTag) -> ScriptProfile {
        if let Some(p) = self.rows.get(&tag.code) {
            return p.clone();
        }
        match tag.script {
            Script::Latin | Script::Other => ScriptProfile::unsupported(),
            script => ScriptProfile::supported([script]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_script_texts() {
        assert_eq!(identify_script("ሰላም"), Script::Ethiopic);
        assert_eq!(identify_script("hello"), Script::Latin);
        assert_eq!(identify_script("1234 …!"), Script::Other);
        assert_eq!(identify_script("မင်္ဂလာပါ"), Script::Myanmar);
        assert_eq!(identify_script("សួស្តី"), Script::Khmer);
        assert_eq!(identify_script("ສະບາຍດີ"), Script::Lao);
        assert_eq!(identify_script("ආයුබෝවන්"), Script::Sinhala);
        assert_eq!(identify_script("ياخشىمۇسىز"), Script::Arabic);
        assert_eq!(identify_script("привет"), Script::Cyrillic);
        assert_eq!(identify_script("你好"), Script::Han);
        assert_eq!(identify_script("नमस्ते"), Script::Other);
    }

    #[test]
    fn majority_and_ties() {
        assert_eq!(identify_script("ሰላም ሰላም hi"), Script::Ethiopic);
        assert_eq!(identify_script("ሰላ hi"), Script::Other);
        // Latin 5 of 11 letters, Ethiopic 3, Cyrillic 3: no majority.
        assert_eq!(identify_script("hello ሰላም при"), Script::Other);
    }

    #[test]
    fn profiles_from_table() {
        let table = ScriptProfileTable::embedded();
        let amh = table.profile(&LanguageTag::from_code("amh_Ethi").unwrap());
        assert!(amh.supported && amh.expected_scripts.contains(&Script::Ethiopic));
        assert!(!amh.accepts("hello world"));
        assert!(amh.accepts("ሰላም ዓለም"));
        let fij = table.profile(&LanguageTag::from_code("fij_Latn").unwrap());
        assert!(!fij.supported && fij.accepts("anything"));
        let unlisted = LanguageTag::new("xyz_Mymr", "Test").unwrap();
        assert_eq!(table.profile(&unlisted), ScriptProfile::supported([Script::Myanmar]));
        assert!(!table.profile(&LanguageTag::new("xyz_Latn", "Test").unwrap()).supported);
    }

    #[test]
    fn every_table_row_is_consistent() {
        let table = ScriptProfileTable::embedded();
        for p in table.rows.values() {
            assert_eq!(p.supported, !p.expected_scripts.is_empty());
        }
        assert!(ScriptProfileTable::parse("amh_Ethi\tKlingon").is_err());
    }
}
