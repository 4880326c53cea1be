use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A constituency tree. Terminals are word leaves; every other node carries
/// a label and at least one child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParseTree {
    Terminal(String),
    Node { label: String, children: Vec<ParseTree> },
}

impl ParseTree {
    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        ParseTree::Node {
            label: label.into(),
            children,
        }
    }

    pub fn leaf(word: impl Into<String>) -> Self {
        ParseTree::Terminal(word.into())
    }

    /// `(TAG word)`
    pub fn preterminal(tag: impl Into<String>, word: impl Into<String>) -> Self {
        ParseTree::node(tag, vec![ParseTree::leaf(word)])
    }

    /// Parses Penn bracket notation. An unlabeled outer wrapper around a
    /// single tree, as the Penn Treebank writes it, is removed.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parser = Parser {
            src: text,
            pos: 0,
        };
        parser.skip_ws();
        if parser.peek() != Some('(') {
            return Err(parser.error("expected '('"));
        }
        let tree = parser.tree()?;
        parser.skip_ws();
        if parser.pos < text.len() {
            return Err(parser.error("trailing input after tree"));
        }
        Ok(match tree {
            ParseTree::Node { label, mut children }
                if label.is_empty() && children.len() == 1 && !children[0].is_terminal() =>
            {
                children.pop().expect("one child")
            }
            other => other,
        })
    }

    pub fn label(&self) -> &str {
        match self {
            ParseTree::Terminal(w) => w,
            ParseTree::Node { label, .. } => label,
        }
    }

    pub fn children(&self) -> &[ParseTree] {
        match self {
            ParseTree::Terminal(_) => &[],
            ParseTree::Node { children, .. } => children,
        }
    }

    pub fn terminal(&self) -> Option<&str> {
        match self {
            ParseTree::Terminal(w) => Some(w),
            ParseTree::Node { .. } => None,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, ParseTree::Terminal(_))
    }

    /// Edges on the longest path from this node down to a terminal.
    pub fn height(&self) -> usize {
        self.children()
            .iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn internal_count(&self) -> usize {
        match self {
            ParseTree::Terminal(_) => 0,
            ParseTree::Node { children, .. } => {
                1 + children.iter().map(ParseTree::internal_count).sum::<usize>()
            }
        }
    }

    /// Left-to-right terminals.
    pub fn yield_words(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Some(w) = t.terminal() {
                out.push(w);
            }
        });
        out
    }

    /// (tag, word) for every terminal; the tag is the terminal's parent label.
    pub fn tagged_words(&self) -> Vec<(&str, &str)> {
        fn go<'a>(t: &'a ParseTree, parent: &'a str, out: &mut Vec<(&'a str, &'a str)>) {
            match t {
                ParseTree::Terminal(w) => out.push((parent, w)),
                ParseTree::Node { label, children } => {
                    for c in children {
                        go(c, label, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(self, "", &mut out);
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ParseTree)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

/// Canonical bracket form: single spaces, no outer wrapper.
impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseTree::Terminal(w) => f.write_str(w),
            ParseTree::Node { label, children } => {
                write!(f, "({label}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::TreeSyntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn atom(&mut self) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '(' || c == ')' {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    // Called with the cursor on '('.
    fn tree(&mut self) -> Result<ParseTree> {
        let open = self.pos;
        self.pos += 1;
        self.skip_ws();
        let label = match self.peek() {
            Some('(') | Some(')') | None => String::new(),
            Some(_) => self.atom().to_string(),
        };
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => {
                    return Err(Error::TreeSyntax {
                        offset: open,
                        message: "unbalanced '(' never closed".into(),
                    })
                }
                Some(')') => {
                    if children.is_empty() {
                        return Err(Error::TreeSyntax {
                            offset: open,
                            message: format!("empty node '{label}'"),
                        });
                    }
                    self.pos += 1;
                    return Ok(ParseTree::Node { label, children });
                }
                Some('(') => children.push(self.tree()?),
                Some(_) => {
                    let word = self.atom().to_string();
                    children.push(ParseTree::Terminal(word));
                }
            }
        }
    }
}

/// One tree per non-blank line; line i belongs to sentence i.
pub fn parse_tree_lines(text: &str) -> Result<Vec<ParseTree>> {
    let mut trees = Vec::new();
    let mut line_start = 0;
    for line in text.split_inclusive('\n') {
        if !line.trim().is_empty() {
            let tree = ParseTree::parse(line).map_err(|e| match e {
                Error::TreeSyntax { offset, message } => Error::TreeSyntax {
                    offset: line_start + offset,
                    message: format!("tree {}: {message}", trees.len() + 1),
                },
                other => other,
            })?;
            trees.push(tree);
        }
        line_start += line.len();
    }
    Ok(trees)
}

pub fn parse_tree_file(path: &Path) -> Result<Vec<ParseTree>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
    parse_tree_lines(&text)
}
