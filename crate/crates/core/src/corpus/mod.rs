//! Documents, tokenization, syllable counting and corpus manifests.

mod manifest;
mod syllables;
mod tokenize;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::coref::CorefChain;
use crate::syntax::ParseTree;

pub use manifest::{load_corpus, CorpusManifest, ManifestEntry, ResourcePaths};
pub use syllables::{count_syllables, heuristic_syllables, PronunciationLexicon};
pub use tokenize::{tokenize, TokenizerConfig};

/// A single word token. Punctuation is never a token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Case-folded surface form.
    pub normalized: String,
    pub is_stop_word: bool,
    pub is_pronoun: bool,
    pub is_proper_noun: bool,
    /// Byte offsets into the source text.
    pub char_start: usize,
    pub char_end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub tokens: Vec<Token>,
}

/// Annotation layers a document may carry beside its text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Annotation {
    Trees,
    Coref,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub grade: Option<i64>,
    pub sentences: Vec<Sentence>,
    /// |D|: every token, stop words included.
    pub token_count: usize,
    /// Case-folded word types; its size is m.
    pub distinct_words: BTreeSet<String>,
    pub trees: Option<Vec<ParseTree>>,
    pub coref: Option<Vec<CorefChain>>,
    /// Annotation layers that were not supplied.
    pub missing: BTreeSet<Annotation>,
}

impl Document {
    pub(crate) fn from_sentences(id: impl Into<String>, sentences: Vec<Sentence>) -> Self {
        let token_count = sentences.iter().map(|s| s.tokens.len()).sum();
        let distinct_words = sentences
            .iter()
            .flat_map(|s| s.tokens.iter().map(|t| t.normalized.clone()))
            .collect();
        Document {
            id: id.into(),
            grade: None,
            sentences,
            token_count,
            distinct_words,
            trees: None,
            coref: None,
            missing: [Annotation::Trees, Annotation::Coref].into_iter().collect(),
        }
    }

    pub fn with_grade(mut self, grade: i64) -> Self {
        self.grade = Some(grade);
        self
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn distinct_count(&self) -> usize {
        self.distinct_words.len()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    /// Distinct normalized words that are not stop words.
    pub fn content_words(&self) -> BTreeSet<&str> {
        self.tokens()
            .filter(|t| !t.is_stop_word)
            .map(|t| t.normalized.as_str())
            .collect()
    }

    pub fn has(&self, annotation: Annotation) -> bool {
        !self.missing.contains(&annotation)
    }

    /// Attaches one tree per sentence. Preterminals tagged NNP/NNPS override
    /// the capitalization heuristic for proper nouns whenever the tree's word
    /// yield lines up with the sentence tokens.
    pub fn attach_trees(&mut self, trees: Vec<ParseTree>) {
        if trees.len() == self.sentences.len() {
            for (sentence, tree) in self.sentences.iter_mut().zip(&trees) {
                let tagged: Vec<(&str, &str)> = tree
                    .tagged_words()
                    .into_iter()
                    .filter(|(_, word)| word.chars().any(char::is_alphanumeric))
                    .collect();
                if tagged.len() != sentence.tokens.len() {
                    continue;
                }
                for (token, (tag, _)) in sentence.tokens.iter_mut().zip(tagged) {
                    token.is_proper_noun = matches!(tag, "NNP" | "NNPS");
                }
            }
        }
        self.trees = Some(trees);
        self.missing.remove(&Annotation::Trees);
    }

    pub fn attach_coref(&mut self, chains: Vec<CorefChain>) {
        self.coref = Some(chains);
        self.missing.remove(&Annotation::Coref);
    }
}

/// ln|D|, the per-sentence length and mean syllables over distinct words.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineFeatures {
    pub word_number: f64,
    pub sentence_length: f64,
    pub syllables: f64,
}

/// `sentence_length_log` selects ln|D| / n instead of |D| / n.
pub fn baseline_features(
    doc: &Document,
    pron: Option<&PronunciationLexicon>,
    sentence_length_log: bool,
) -> crate::Result<BaselineFeatures> {
    if doc.token_count == 0 || doc.sentences.is_empty() {
        return Err(crate::Error::EmptyDocument);
    }
    let tokens = doc.token_count as f64;
    let n = doc.sentence_count() as f64;
    let word_number = tokens.ln();
    let sentence_length = if sentence_length_log {
        word_number / n
    } else {
        tokens / n
    };
    let total: u64 = doc
        .distinct_words
        .iter()
        .map(|w| u64::from(count_syllables(w, pron)))
        .sum();
    Ok(BaselineFeatures {
        word_number,
        sentence_length,
        syllables: total as f64 / doc.distinct_count() as f64,
    })
}
