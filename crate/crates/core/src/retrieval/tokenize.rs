use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

pub fn is_punctuation(c: char) -> bool {
    c.general_category_group() == GeneralCategoryGroup::Punctuation
}

/// Retrieval tokenizer: per-codepoint lowercasing, whitespace split, leading
/// and trailing punctuation stripped from every token, empty tokens dropped.
pub fn tokenize_retrieval(text: &str) -> Vec<String> {
    let lowered: String = text.chars().flat_map(char::to_lowercase).collect();
    split_strip(&lowered)
}

/// Same as [`tokenize_retrieval`] without lowercasing.
pub fn tokenize_cased(text: &str) -> Vec<String> {
    split_strip(text)
}

fn split_strip(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|tok| tok.trim_matches(is_punctuation))
        .filter(|tok| !tok.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stated_examples() {
        assert_eq!(tokenize_retrieval("The cat, sat."), vec!["the", "cat", "sat"]);
        assert!(tokenize_retrieval("").is_empty());
        assert_eq!(tokenize_retrieval("Mallzee  was"), vec!["mallzee", "was"]);
    }

    #[test]
    fn inner_punctuation_survives() {
        assert_eq!(
            tokenize_retrieval("\"4-month-old mice,\" he said... («Été»)"),
            vec!["4-month-old", "mice", "he", "said", "été"]
        );
        assert_eq!(tokenize_cased("Hello, World!"), vec!["Hello", "World"]);
        assert!(tokenize_retrieval(" -- ... ").is_empty());
    }

    #[test]
    fn ethiopic_wordspace_is_punctuation() {
        // U+1362 ETHIOPIC FULL STOP
        assert_eq!(tokenize_retrieval("ሰላም።"), vec!["ሰላም"]);
    }
}
