//! A small tree-pattern language over constituency trees.
//!
//! ```text
//! pattern  := head relation*
//! head     := labels | '(' pattern ')'
//! relation := ('<' | '<<' | '.') (labels | '(' pattern ')')
//! labels   := LABEL ('|' LABEL)*        -- `__` matches any label
//! ```
//!
//! `A < B`: A is the parent of B. `A << B`: A is a proper ancestor of B.
//! `A . B`: B is A's next sibling. Every relation in a chain constrains the
//! head, so `VP < VBD < NP` asks for one VP with both children. Only labeled
//! nodes bind; terminals never do.

use std::path::Path;

use super::ParseTree;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Parent,
    Ancestor,
    Precedes,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    /// Empty means wildcard.
    labels: Vec<String>,
    relations: Vec<(Relation, Pattern)>,
}

impl Pattern {
    pub fn compile(expr: &str) -> Result<Self> {
        let tokens = lex(expr)?;
        let mut p = PatternParser { tokens, pos: 0, len: expr.chars().count() };
        let pattern = p.pattern()?;
        if let Some((tok, at)) = p.tokens.get(p.pos) {
            return Err(syntax(*at, format!("unexpected {}", tok.describe())));
        }
        Ok(pattern)
    }

    /// Number of distinct nodes that can bind the head atom.
    pub fn count_matches(&self, tree: &ParseTree, strip_suffixes: bool) -> usize {
        let indexed = IndexedTree::new(tree, strip_suffixes);
        self.count_in(&indexed)
    }

    pub(crate) fn count_in(&self, tree: &IndexedTree) -> usize {
        (0..tree.nodes.len()).filter(|&n| self.matches_at(tree, n)).count()
    }

    fn label_ok(&self, label: &str) -> bool {
        self.labels.is_empty() || self.labels.iter().any(|l| l == label)
    }

    fn matches_at(&self, tree: &IndexedTree, n: usize) -> bool {
        let node = &tree.nodes[n];
        self.label_ok(&node.label)
            && self.relations.iter().all(|(rel, sub)| match rel {
                Relation::Parent => node.children.iter().any(|&c| sub.matches_at(tree, c)),
                Relation::Ancestor => tree.descendants(n).any(|d| sub.matches_at(tree, d)),
                Relation::Precedes => node.next_sibling.is_some_and(|s| sub.matches_at(tree, s)),
            })
    }
}

/// Label-bearing nodes of a tree in pre-order with parent/sibling links.
#[derive(Debug)]
pub(crate) struct IndexedTree {
    nodes: Vec<IndexedNode>,
}

#[derive(Debug)]
struct IndexedNode {
    label: String,
    children: Vec<usize>,
    next_sibling: Option<usize>,
    /// Pre-order index one past the last descendant.
    subtree_end: usize,
}

impl IndexedTree {
    pub(crate) fn new(tree: &ParseTree, strip_suffixes: bool) -> Self {
        fn add(t: &ParseTree, strip: bool, nodes: &mut Vec<IndexedNode>) -> Option<usize> {
            let ParseTree::Node { label, children } = t else {
                return None;
            };
            let me = nodes.len();
            nodes.push(IndexedNode {
                label: if strip { base_label(label).to_string() } else { label.clone() },
                children: Vec::new(),
                next_sibling: None,
                subtree_end: 0,
            });
            // Terminal siblings break adjacency, so they are kept as `None`.
            let kids: Vec<Option<usize>> = children.iter().map(|c| add(c, strip, nodes)).collect();
            for w in kids.windows(2) {
                if let [Some(a), b] = w {
                    nodes[*a].next_sibling = *b;
                }
            }
            nodes[me].children = kids.into_iter().flatten().collect();
            nodes[me].subtree_end = nodes.len();
            Some(me)
        }
        let mut nodes = Vec::new();
        add(tree, strip_suffixes, &mut nodes);
        IndexedTree { nodes }
    }

    fn descendants(&self, n: usize) -> std::ops::Range<usize> {
        n + 1..self.nodes[n].subtree_end
    }

    pub(crate) fn labels(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.label.as_str())
    }
}

/// Drops function tags and indices: `NP-SBJ-1` -> `NP`, `NP=2` -> `NP`.
/// Labels that start with `-` (`-NONE-`, `-LRB-`) are left alone.
pub fn base_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    match label.find(['-', '=']) {
        Some(i) => &label[..i],
        None => label,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Label(String),
    Bar,
    Open,
    Close,
    Rel(Relation),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Label(l) => format!("label '{l}'"),
            Tok::Bar => "'|'".into(),
            Tok::Open => "'('".into(),
            Tok::Close => "')'".into(),
            Tok::Rel(Relation::Parent) => "'<'".into(),
            Tok::Rel(Relation::Ancestor) => "'<<'".into(),
            Tok::Rel(Relation::Precedes) => "'.'".into(),
        }
    }
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::PatternSyntax {
        position,
        message: message.into(),
    }
}

fn lex(expr: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = expr.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::Open,
            ')' => Tok::Close,
            '|' => Tok::Bar,
            '.' => Tok::Rel(Relation::Precedes),
            '<' if chars.get(i + 1) == Some(&'<') => {
                out.push((Tok::Rel(Relation::Ancestor), i));
                i += 2;
                continue;
            }
            '<' => Tok::Rel(Relation::Parent),
            c if c.is_alphanumeric() || matches!(c, '_' | '$' | '-' | '=' | ',' | ':' | '`' | '\'') => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric()
                        || matches!(chars[i], '_' | '$' | '-' | '=' | ',' | ':' | '`' | '\''))
                {
                    i += 1;
                }
                out.push((Tok::Label(chars[start..i].iter().collect()), start));
                continue;
            }
            other => return Err(syntax(i, format!("unexpected character '{other}'"))),
        };
        out.push((tok, i));
        i += 1;
    }
    Ok(out)
}

struct PatternParser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl PatternParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn at(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |&(_, p)| p)
    }

    fn pattern(&mut self) -> Result<Pattern> {
        let mut head = self.operand()?;
        while let Some(Tok::Rel(rel)) = self.peek().cloned() {
            self.pos += 1;
            let target = self.operand()?;
            head.relations.push((rel, target));
        }
        Ok(head)
    }

    fn operand(&mut self) -> Result<Pattern> {
        match self.peek() {
            Some(Tok::Open) => {
                self.pos += 1;
                let inner = self.pattern()?;
                match self.peek() {
                    Some(Tok::Close) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(t) => Err(syntax(self.at(), format!("expected ')', found {}", t.describe()))),
                    None => Err(syntax(self.at(), "expected ')' before end of pattern")),
                }
            }
            Some(Tok::Label(_)) => self.labels(),
            Some(t) => Err(syntax(self.at(), format!("expected a label or '(', found {}", t.describe()))),
            None => Err(syntax(self.at(), "expected a label or '(' before end of pattern")),
        }
    }

    fn labels(&mut self) -> Result<Pattern> {
        let mut labels = Vec::new();
        let mut wildcard = false;
        loop {
            match self.peek() {
                Some(Tok::Label(l)) => {
                    if l == "__" {
                        wildcard = true;
                    }
                    labels.push(l.clone());
                    self.pos += 1;
                }
                _ => return Err(syntax(self.at(), "expected a label after '|'")),
            }
            if self.peek() == Some(&Tok::Bar) {
                self.pos += 1;
            } else {
                break;
            }
        }
        if wildcard {
            labels.clear();
        }
        Ok(Pattern {
            labels,
            relations: Vec::new(),
        })
    }
}

/// A compiled pattern tied to the grade it signals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarPattern {
    pub id: String,
    pub grade: u8,
    pub expr: String,
    pub pattern: Pattern,
}

impl GrammarPattern {
    pub fn new(id: impl Into<String>, grade: u8, expr: &str) -> Result<Self> {
        if !(1..=6).contains(&grade) {
            return Err(Error::Domain(format!("grammar grade {grade} outside 1..=6")));
        }
        Ok(GrammarPattern {
            id: id.into(),
            grade,
            expr: expr.to_string(),
            pattern: Pattern::compile(expr)?,
        })
    }
}

const STARTER_PATTERNS: &str = include_str!("../../data/grammar_patterns.tsv");

/// Parses `id<TAB>grade<TAB>expr` lines.
pub fn parse_patterns(text: &str, source: &str) -> Result<Vec<GrammarPattern>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let schema = |message: String| Error::Schema {
            path: source.to_string(),
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.splitn(3, '\t').collect();
        let [id, grade, expr] = fields[..] else {
            return Err(schema("expected id<TAB>grade<TAB>expr".into()));
        };
        let grade: u8 = grade
            .trim()
            .parse()
            .ok()
            .filter(|g| (1..=6).contains(g))
            .ok_or_else(|| schema(format!("grade '{grade}' is not an integer in 1..=6")))?;
        let gp = GrammarPattern::new(id.trim(), grade, expr.trim()).map_err(|e| schema(e.to_string()))?;
        out.push(gp);
    }
    Ok(out)
}

pub fn load_patterns(path: &Path) -> Result<Vec<GrammarPattern>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
    parse_patterns(&text, &path.display().to_string())
}

/// The bundled stand-in pattern set (see `data/grammar_patterns.tsv`).
pub fn starter_patterns() -> Vec<GrammarPattern> {
    parse_patterns(STARTER_PATTERNS, "grammar_patterns.tsv").expect("bundled patterns compile")
}
