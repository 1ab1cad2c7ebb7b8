//! Recursive root splitting of a dependency tree into short contiguous spans.

use serde::{Deserialize, Serialize};

use crate::corpus::DependencyTree;

pub const DEFAULT_MAX_WORDS: usize = 4;

/// A leaf span `[start, end)` over 0-based token positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub text: String,
    /// Longer than the limit but its local root is the last token, so the
    /// right part would be empty.
    pub unsplittable: bool,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Leftmost token in `[start, end)` whose head lies outside the span.
/// The tree root (head 0) always counts as outside.
pub fn local_root(tree: &DependencyTree, start: usize, end: usize) -> usize {
    (start..end)
        .find(|&i| {
            let head = tree.head(i + 1);
            head == 0 || head <= start || head > end
        })
        .expect("a contiguous span of a tree always has a token governed from outside")
}

/// Splits the sentence after the local root of each span until every span
/// has at most `max_words` tokens. Pending spans sit on a stack with the
/// longer one pushed first; leaves come back ordered by start position.
pub fn structure_split(tree: &DependencyTree, max_words: usize) -> Vec<Segment> {
    let forms = tree.forms();
    let leaf = |start: usize, end: usize, unsplittable: bool| Segment {
        start,
        end,
        text: forms[start..end].join(" "),
        unsplittable,
    };

    let mut stack = vec![(0, tree.len())];
    let mut leaves = Vec::new();
    while let Some((start, end)) = stack.pop() {
        if end - start <= max_words {
            leaves.push(leaf(start, end, false));
            continue;
        }
        let root = local_root(tree, start, end);
        if root + 1 == end {
            leaves.push(leaf(start, end, true));
            continue;
        }
        let left = (start, root + 1);
        let right = (root + 1, end);
        if left.1 - left.0 >= right.1 - right.0 {
            stack.push(left);
            stack.push(right);
        } else {
            stack.push(right);
            stack.push(left);
        }
    }
    leaves.sort_by_key(|s| s.start);
    leaves
}
