use std::collections::HashMap;

/// Default repetition bound: a bigram seen more often than this marks a
/// degenerate generation.
pub const DEFAULT_BIGRAM_THRESHOLD: usize = 8;

/// Cuts a generation that loops. Among the whitespace bigrams occurring more
/// than `threshold` times, the one whose first occurrence comes earliest wins;
/// everything after that first occurrence is dropped and the tokens are
/// re-joined with single spaces. Repeats until no bigram exceeds the bound.
/// Text without such a bigram is returned untouched.
pub fn truncate_repeating_bigrams(text: &str, threshold: usize) -> String {
    let mut tokens: Vec<&str> = text.split_whitespace().collect();
    let mut changed = false;
    while let Some(first) = earliest_overused_bigram(&tokens, threshold) {
        tokens.truncate(first + 2);
        changed = true;
    }
    if changed {
        tokens.join(" ")
    } else {
        text.to_string()
    }
}

/// Start position of the first occurrence of the earliest bigram that occurs
/// more than `threshold` times.
fn earliest_overused_bigram(tokens: &[&str], threshold: usize) -> Option<usize> {
    let mut stats: HashMap<(&str, &str), (usize, usize)> = HashMap::new();
    for (i, w) in tokens.windows(2).enumerate() {
        stats.entry((w[0], w[1])).or_insert((i, 0)).1 += 1;
    }
    stats.values().filter(|(_, count)| *count > threshold).map(|(first, _)| *first).min()
}
