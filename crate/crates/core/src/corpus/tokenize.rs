use std::collections::HashSet;
use std::path::Path;

use super::{Document, Sentence, Token};
use crate::{Error, Result};

const DEFAULT_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");
const DEFAULT_STOP_WORDS: &str = include_str!("../../data/stop_words.txt");
const DEFAULT_PRONOUNS: &str = include_str!("../../data/pronouns.txt");

/// Closed-class word lists driving sentence splitting and token flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    /// Whole whitespace chunks, period included (`Dr.`), compared case-insensitively.
    pub abbreviations: HashSet<String>,
    pub stop_words: HashSet<String>,
    pub pronouns: HashSet<String>,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            abbreviations: parse_list(DEFAULT_ABBREVIATIONS),
            stop_words: parse_list(DEFAULT_STOP_WORDS),
            pronouns: parse_list(DEFAULT_PRONOUNS),
        }
    }
}

impl TokenizerConfig {
    /// Replaces whichever lists are given; the rest keep their defaults.
    pub fn from_files(
        abbreviations: Option<&Path>,
        stop_words: Option<&Path>,
        pronouns: Option<&Path>,
    ) -> Result<Self> {
        let mut config = TokenizerConfig::default();
        if let Some(p) = abbreviations {
            config.abbreviations = load_list(p)?;
        }
        if let Some(p) = stop_words {
            config.stop_words = load_list(p)?;
        }
        if let Some(p) = pronouns {
            config.pronouns = load_list(p)?;
        }
        Ok(config)
    }

    fn is_abbreviation(&self, chunk: &str) -> bool {
        self.abbreviations.contains(&chunk.to_lowercase())
    }
}

/// One entry per line; blank lines and `#` comments are skipped. Entries are
/// case-folded.
pub fn load_list(path: &Path) -> Result<HashSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
    Ok(parse_list(&text))
}

fn parse_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '”' | '’' | '»')
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '“' | '‘' | '«')
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '’' | '-')
}

/// Byte offsets where sentences end.
fn sentence_breaks(text: &str, config: &TokenizerConfig) -> Vec<usize> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut breaks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        if !is_terminal(c) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < chars.len() && is_terminal(chars[j].1) {
            j += 1;
        }
        let single_period = j == i + 1 && c == '.';
        while j < chars.len() && is_closer(chars[j].1) {
            j += 1;
        }
        let end = chars.get(j).map_or(text.len(), |&(b, _)| b);

        let mut k = j;
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        while k < chars.len() && is_opener(chars[k].1) {
            k += 1;
        }
        let at_end = k >= chars.len();
        let followed_by_capital = k > j
            && chars[j].1.is_whitespace()
            && chars.get(k).is_some_and(|&(_, c)| c.is_uppercase());

        if at_end || followed_by_capital {
            let abbreviated = single_period && {
                let chunk_start = text[..start]
                    .char_indices()
                    .rev()
                    .find(|(_, c)| c.is_whitespace())
                    .map_or(0, |(p, c)| p + c.len_utf8());
                let chunk = text[chunk_start..start + 1].trim_start_matches(is_opener);
                config.is_abbreviation(chunk)
            };
            if !abbreviated || at_end {
                breaks.push(end);
            }
        }
        i = j.max(i + 1);
    }
    breaks
}

fn word_spans(text: &str, from: usize, to: usize) -> Vec<(usize, usize)> {
    let segment = &text[from..to];
    let chars: Vec<(usize, char)> = segment.char_indices().collect();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].1.is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = chars[i].0;
        let mut j = i + 1;
        loop {
            if j < chars.len() && chars[j].1.is_alphanumeric() {
                j += 1;
            } else if j + 1 < chars.len() && is_joiner(chars[j].1) && chars[j + 1].1.is_alphanumeric() {
                j += 2;
            } else {
                break;
            }
        }
        let end = chars.get(j).map_or(segment.len(), |&(b, _)| b);
        spans.push((from + start, from + end));
        i = j;
    }
    spans
}

/// Splits raw text into sentences of word tokens.
///
/// Sentences end at `.`, `!` or `?` followed by whitespace and a capital
/// letter (or the end of the text); a period closing a listed abbreviation
/// does not end a sentence. Proper nouns are flagged by capitalization
/// away from sentence starts; attached trees may later override that.
pub fn tokenize(id: &str, text: &str, config: &TokenizerConfig) -> Result<Document> {
    let mut bounds = sentence_breaks(text, config);
    if bounds.last() != Some(&text.len()) {
        bounds.push(text.len());
    }
    let mut sentences = Vec::new();
    let mut from = 0;
    for to in bounds {
        let tokens: Vec<Token> = word_spans(text, from, to)
            .into_iter()
            .enumerate()
            .map(|(pos, (s, e))| make_token(&text[s..e], s, e, pos == 0, config))
            .collect();
        if !tokens.is_empty() {
            sentences.push(Sentence {
                index: sentences.len(),
                tokens,
            });
        }
        from = to;
    }
    if sentences.is_empty() {
        return Err(Error::EmptyDocument);
    }
    Ok(Document::from_sentences(id, sentences))
}

fn make_token(surface: &str, start: usize, end: usize, sentence_initial: bool, config: &TokenizerConfig) -> Token {
    let normalized = surface.to_lowercase().replace('’', "'");
    let is_pronoun = config.pronouns.contains(&normalized);
    let capitalized = surface.chars().next().is_some_and(char::is_uppercase);
    Token {
        surface: surface.to_string(),
        is_stop_word: config.stop_words.contains(&normalized),
        is_pronoun,
        is_proper_noun: capitalized && !sentence_initial && !is_pronoun,
        normalized,
        char_start: start,
        char_end: end,
    }
}
