// CoNLL-U subset reader. Only ID, FORM, HEAD and DEPREL are consumed.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, CorpusError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyToken {
    pub form: String,
    /// 0 for the root, otherwise the 1-based index of the governing token.
    pub head: usize,
    pub deprel: String,
}

/// A validated dependency tree: exactly one root, in-range heads, no
/// self-loops and no head cycles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependencyTree {
    tokens: Vec<DependencyToken>,
}

/// Reasons a token list is not a tree. Mapped to [`CorpusError`] with the
/// block number by the loader.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeViolation {
    Empty,
    NoRoot,
    MultipleRoots,
    HeadOutOfRange(usize),
    SelfHead(usize),
    Cycle,
}

impl DependencyTree {
    pub fn new(tokens: Vec<DependencyToken>) -> Result<Self, TreeViolation> {
        let n = tokens.len();
        if n == 0 {
            return Err(TreeViolation::Empty);
        }
        let mut roots = 0;
        for (i, tok) in tokens.iter().enumerate() {
            if tok.head > n {
                return Err(TreeViolation::HeadOutOfRange(i + 1));
            }
            if tok.head == i + 1 {
                return Err(TreeViolation::SelfHead(i + 1));
            }
            if tok.head == 0 {
                roots += 1;
            }
        }
        match roots {
            0 => return Err(TreeViolation::NoRoot),
            1 => {}
            _ => return Err(TreeViolation::MultipleRoots),
        }
        // With a single root, a token that cannot reach it within n steps sits on a cycle.
        for start in 1..=n {
            let mut cur = start;
            let mut steps = 0;
            while cur != 0 {
                cur = tokens[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err(TreeViolation::Cycle);
                }
            }
        }
        Ok(Self { tokens })
    }

    pub fn tokens(&self) -> &[DependencyToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// 1-based index of the root token.
    pub fn root(&self) -> usize {
        self.tokens.iter().position(|t| t.head == 0).map(|i| i + 1).unwrap_or(1)
    }

    /// Head of the 1-based token `index`.
    pub fn head(&self, index: usize) -> usize {
        self.tokens[index - 1].head
    }

    pub fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.form.as_str()).collect()
    }
}

pub fn load_dependency_trees(path: &Path) -> Result<BTreeMap<usize, DependencyTree>, CorpusError> {
    parse_dependency_trees(&read_file(path)?)
}

#[derive(Default)]
struct Block {
    first_line: usize,
    sent_id: Option<usize>,
    tokens: Vec<DependencyToken>,
}

/// Parses blank-line separated blocks. A `# sent_id = N` comment binds the
/// block to corpus sentence `N`; otherwise blocks bind by their order.
pub fn parse_dependency_trees(text: &str) -> Result<BTreeMap<usize, DependencyTree>, CorpusError> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut current: Option<Block> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(b) = current.take() {
                blocks.push(b);
            }
            continue;
        }
        let block = current.get_or_insert_with(|| Block { first_line: line_no, ..Default::default() });
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    block.sent_id = value.trim().parse().ok();
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 8 {
            return Err(CorpusError::MalformedConllu(line_no));
        }
        let id = cols[0];
        // Multiword ranges ("3-4") and empty nodes ("8.1") carry no head.
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let id: usize = id.parse().map_err(|_| CorpusError::MalformedConllu(line_no))?;
        if id != block.tokens.len() + 1 {
            return Err(CorpusError::MalformedConllu(line_no));
        }
        let head: usize = cols[6].parse().map_err(|_| CorpusError::MalformedConllu(line_no))?;
        block.tokens.push(DependencyToken { form: cols[1].to_string(), head, deprel: cols[7].to_string() });
    }
    if let Some(b) = current.take() {
        blocks.push(b);
    }

    let mut trees = BTreeMap::new();
    for (block_no, block) in blocks.into_iter().enumerate() {
        if block.tokens.is_empty() {
            // comment-only block
            if block.sent_id.is_none() {
                continue;
            }
            return Err(CorpusError::MalformedConllu(block.first_line));
        }
        let tree = DependencyTree::new(block.tokens).map_err(|v| match v {
            TreeViolation::NoRoot | TreeViolation::Empty => CorpusError::NoRoot(block_no),
            TreeViolation::MultipleRoots => CorpusError::MultipleRoots(block_no),
            TreeViolation::Cycle => CorpusError::HeadCycle(block_no),
            TreeViolation::HeadOutOfRange(_) | TreeViolation::SelfHead(_) => {
                CorpusError::MalformedConllu(block.first_line)
            }
        })?;
        let sid = block.sent_id.unwrap_or(block_no);
        if trees.insert(sid, tree).is_some() {
            return Err(CorpusError::DuplicateTree(sid));
        }
    }
    Ok(trees)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, form: &str, head: &str, rel: &str) -> String {
        format!("{id}\t{form}\t_\t_\t_\t_\t{head}\t{rel}\t_\t_")
    }

    #[test]
    fn parses_root_and_heads() {
        let text = [row("1", "Cats", "2", "nsubj"), row("2", "sleep", "0", "root")].join("\n");
        let trees = parse_dependency_trees(&text).unwrap();
        let tree = &trees[&0];
        assert_eq!(tree.root(), 2);
        assert_eq!(tree.forms(), vec!["Cats", "sleep"]);
        assert_eq!(tree.tokens()[0].deprel, "nsubj");
    }

    #[test]
    fn two_roots_rejected() {
        let text = [row("1", "a", "0", "root"), row("2", "b", "0", "root")].join("\n");
        assert!(matches!(parse_dependency_trees(&text), Err(CorpusError::MultipleRoots(0))));
    }

    #[test]
    fn no_root_and_cycles_rejected() {
        let text = [row("1", "a", "2", "x"), row("2", "b", "1", "x")].join("\n");
        assert!(matches!(parse_dependency_trees(&text), Err(CorpusError::NoRoot(0))));
        let text = [row("1", "a", "0", "root"), row("2", "b", "3", "x"), row("3", "c", "2", "x")].join("\n");
        assert!(matches!(parse_dependency_trees(&text), Err(CorpusError::HeadCycle(0))));
    }

    #[test]
    fn range_ids_skipped() {
        let text = [
            row("1", "I", "2", "nsubj"),
            row("2", "do", "0", "root"),
            row("3-4", "don't", "_", "_"),
            row("3", "do", "2", "aux"),
            row("4", "n't", "2", "advmod"),
        ]
        .join("\n");
        let trees = parse_dependency_trees(&text).unwrap();
        assert_eq!(trees[&0].forms(), vec!["I", "do", "do", "n't"]);
    }

    #[test]
    fn sent_id_binding_and_order_binding() {
        let text =
            format!("# sent_id = 7\n{}\n\n# text = x\n{}\n", row("1", "a", "0", "root"), row("1", "b", "0", "root"));
        let trees = parse_dependency_trees(&text).unwrap();
        assert_eq!(trees.keys().copied().collect::<Vec<_>>(), vec![1, 7]);
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_dependency_trees("1\tCats\t2"), Err(CorpusError::MalformedConllu(1))));
        let text = [row("1", "a", "0", "root"), row("2", "b", "x", "dep")].join("\n");
        assert!(matches!(parse_dependency_trees(&text), Err(CorpusError::MalformedConllu(2))));
        let text = [row("1", "a", "0", "root"), row("2", "b", "9", "dep")].join("\n");
        assert!(matches!(parse_dependency_trees(&text), Err(CorpusError::MalformedConllu(1))));
    }
}
