//! Constituency trees, the parsing features derived from them, and grammar
//! grading features counted with tree patterns.

mod pattern;
mod tree;

use serde::{Deserialize, Serialize};

pub use pattern::{
    base_label, load_patterns, parse_patterns, starter_patterns, GrammarPattern, Pattern, Relation,
};
pub use tree::{parse_tree_file, parse_tree_lines, ParseTree};

use crate::{Error, Result};
use pattern::IndexedTree;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseCounts {
    pub np: usize,
    pub vp: usize,
    pub sbar: usize,
    pub pp: usize,
}

impl std::ops::Add for PhraseCounts {
    type Output = PhraseCounts;

    fn add(self, o: PhraseCounts) -> PhraseCounts {
        PhraseCounts {
            np: self.np + o.np,
            vp: self.vp + o.vp,
            sbar: self.sbar + o.sbar,
            pp: self.pp + o.pp,
        }
    }
}

/// Labeled nodes named NP, VP, SBAR and PP (after optional tag stripping).
pub fn phrase_counts(tree: &ParseTree, strip_suffixes: bool) -> PhraseCounts {
    let mut c = PhraseCounts::default();
    for label in IndexedTree::new(tree, strip_suffixes).labels() {
        match label {
            "NP" => c.np += 1,
            "VP" => c.vp += 1,
            "SBAR" => c.sbar += 1,
            "PP" => c.pp += 1,
            _ => {}
        }
    }
    c
}

/// Per-sentence means of tree height and phrase counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsingFeatures {
    pub tree_height: f64,
    pub np: f64,
    pub vp: f64,
    pub sbar: f64,
    pub pp: f64,
}

fn check_alignment(trees: &[ParseTree], n: usize) -> Result<()> {
    if trees.len() != n || n == 0 {
        return Err(Error::AnnotationMismatch(format!(
            "{} trees for {n} sentences",
            trees.len()
        )));
    }
    Ok(())
}

pub fn parsing_features(trees: &[ParseTree], n: usize, strip_suffixes: bool) -> Result<ParsingFeatures> {
    check_alignment(trees, n)?;
    let heights: usize = trees.iter().map(ParseTree::height).sum();
    let counts = trees
        .iter()
        .map(|t| phrase_counts(t, strip_suffixes))
        .fold(PhraseCounts::default(), |a, b| a + b);
    let n = n as f64;
    Ok(ParsingFeatures {
        tree_height: heights as f64 / n,
        np: counts.np as f64 / n,
        vp: counts.vp as f64 / n,
        sbar: counts.sbar as f64 / n,
        pp: counts.pp as f64 / n,
    })
}

/// What grammar match totals are divided by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrammarNormalization {
    #[default]
    PerSentence,
    Per100Words,
}

/// grammar1..grammar6: matches of every pattern at that grade, summed over
/// all trees and normalized. Listing a pattern twice counts it twice.
pub fn grammar_features(
    trees: &[ParseTree],
    patterns: &[GrammarPattern],
    n: usize,
    token_count: usize,
    normalization: GrammarNormalization,
    strip_suffixes: bool,
) -> Result<[f64; 6]> {
    check_alignment(trees, n)?;
    let indexed: Vec<IndexedTree> = trees.iter().map(|t| IndexedTree::new(t, strip_suffixes)).collect();
    let mut totals = [0usize; 6];
    for p in patterns {
        let hits: usize = indexed.iter().map(|t| p.pattern.count_in(t)).sum();
        totals[usize::from(p.grade) - 1] += hits;
    }
    let denom = match normalization {
        GrammarNormalization::PerSentence => n as f64,
        GrammarNormalization::Per100Words => token_count as f64 / 100.0,
    };
    Ok(totals.map(|t| t as f64 / denom))
}
