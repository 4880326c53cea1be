//! Native-reader readability formulas used as comparison estimators.

use serde::{Deserialize, Serialize};

use crate::corpus::{count_syllables, Document, PronunciationLexicon};
use crate::{Error, Result};

/// Column names used when classic scores are added to a dataset.
pub const CLASSIC_NAMES: [&str; 3] = ["flesch_reading_ease", "flesch_kincaid_grade", "coleman_liau"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassicScores {
    pub flesch_reading_ease: f64,
    pub flesch_kincaid_grade: f64,
    pub coleman_liau: f64,
}

impl ClassicScores {
    /// Scores oriented so that larger means harder. Reading Ease is
    /// negated; the grade formulas already grow with difficulty.
    pub fn difficulty_oriented(&self) -> [f64; 3] {
        [-self.flesch_reading_ease, self.flesch_kincaid_grade, self.coleman_liau]
    }
}

/// Syllables summed over every token (not distinct words).
pub fn syllable_total(doc: &Document, pron: Option<&PronunciationLexicon>) -> u64 {
    doc.tokens().map(|t| u64::from(count_syllables(&t.normalized, pron))).sum()
}

pub fn letter_count(doc: &Document) -> u64 {
    doc.tokens()
        .map(|t| t.surface.chars().filter(|c| c.is_alphabetic()).count() as u64)
        .sum()
}

/// Flesch Reading Ease, Flesch–Kincaid Grade Level and Coleman–Liau index
/// with their published constants.
pub fn classic_formulas(doc: &Document, pron: Option<&PronunciationLexicon>) -> Result<ClassicScores> {
    if doc.token_count == 0 || doc.sentences.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let words = doc.token_count as f64;
    let sentences = doc.sentence_count() as f64;
    let syllables = syllable_total(doc, pron) as f64;
    let wps = words / sentences;
    let spw = syllables / words;
    let l = letter_count(doc) as f64 / words * 100.0;
    let s = sentences / words * 100.0;
    Ok(ClassicScores {
        flesch_reading_ease: 206.835 - 1.015 * wps - 84.6 * spw,
        flesch_kincaid_grade: 0.39 * wps + 11.8 * spw - 15.59,
        coleman_liau: 0.0588 * l - 0.296 * s - 15.8,
    })
}
