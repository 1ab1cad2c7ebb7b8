use std::sync::OnceLock;

use regex::Regex;

use super::PromptError;

/// Upper bound on phrases taken from one decomposition.
pub const DEFAULT_PHRASE_CAP: usize = 16;

fn item_marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // "1. text" or "1) text"
    RE.get_or_init(|| Regex::new(r"^\s*\d+[.)]\s+(\S.*)$").expect("valid regex"))
}

/// Extracts the numbered list from a divide-prompt completion.
///
/// Lines that are not list items are skipped. Once the first item is found, a
/// blank line ends the list. At most `cap` phrases are returned.
pub fn parse_propositions(llm_output: &str, cap: usize) -> Result<Vec<String>, PromptError> {
    let mut phrases = Vec::new();
    for line in llm_output.lines() {
        if line.trim().is_empty() {
            if phrases.is_empty() {
                continue;
            }
            break;
        }
        if let Some(caps) = item_marker().captures(line) {
            let text = caps[1].trim();
            if !text.is_empty() {
                phrases.push(text.to_string());
                if phrases.len() == cap {
                    break;
                }
            }
        }
    }
    if phrases.is_empty() {
        Err(PromptError::NoPropositionsFound)
    } else {
        Ok(phrases)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mallzee_exemplar() {
        let out =
            "Propositions\n 1. Mallzee was founded in December 2012 by Cally Russell.\n 2. It is based in Edinburgh.";
        assert_eq!(
            parse_propositions(out, DEFAULT_PHRASE_CAP).unwrap(),
            vec!["Mallzee was founded in December 2012 by Cally Russell.", "It is based in Edinburgh."]
        );
    }

    #[test]
    fn prose_is_rejected() {
        assert_eq!(parse_propositions("no list here", 16), Err(PromptError::NoPropositionsFound));
        assert_eq!(parse_propositions("", 16), Err(PromptError::NoPropositionsFound));
        assert_eq!(parse_propositions("1.5 million people", 16), Err(PromptError::NoPropositionsFound));
    }

    #[test]
    fn cap_applies() {
        let out: String = (1..=20).map(|i| format!("{i}. Item {i}.\n")).collect();
        let got = parse_propositions(&out, 16).unwrap();
        assert_eq!(got.len(), 16);
        assert_eq!(got[15], "Item 16.");
    }

    #[test]
    fn stops_at_blank_line_and_accepts_paren_markers() {
        let out =
            "Sure!\n\n    1) First one.\n    2) Second one. \n\n###\n\nSentence\nX\n\nPropositions\n    1. Leaked.";
        assert_eq!(parse_propositions(out, 16).unwrap(), vec!["First one.", "Second one."]);
    }

    proptest! {
        #[test]
        fn numbered_list_round_trip(items in proptest::collection::vec("[A-Za-z0-9,;'\"-]([A-Za-z0-9 ,.;'\"-]{0,40}[A-Za-z0-9.,])?", 1..=16)) {
            let rendered: String = items
                .iter()
                .enumerate()
                .map(|(i, s)| format!("    {}. {}\n", i + 1, s))
                .collect();
            prop_assert_eq!(parse_propositions(&rendered, 16).unwrap(), items);
        }
    }
}
