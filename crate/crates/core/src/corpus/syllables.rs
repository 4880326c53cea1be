use std::collections::HashMap;
use std::path::Path;

use crate::{Error, Result};

/// Word -> syllable count read from a CMU-style pronunciation dictionary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PronunciationLexicon {
    syllables: HashMap<String, u32>,
}

impl PronunciationLexicon {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
        Ok(Self::parse(&text))
    }

    /// Lines are `WORD  PH1 PH2 ...`; `;;;` starts a comment. Alternate
    /// pronunciations (`WORD(2)`) are ignored in favour of the first.
    pub fn parse(text: &str) -> Self {
        let mut syllables = HashMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with(";;;") {
                continue;
            }
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            if word.ends_with(')') {
                continue;
            }
            let vowels = parts
                .filter(|ph| ph.ends_with(|c: char| c.is_ascii_digit()))
                .count() as u32;
            syllables
                .entry(word.to_lowercase())
                .or_insert(vowels.max(1));
        }
        PronunciationLexicon { syllables }
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.syllables.get(&word.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, u32)> {
        self.syllables.iter().map(|(w, &n)| (w.as_str(), n))
    }
}

/// Dictionary count when the word is listed, otherwise the vowel-group
/// heuristic. Always at least 1.
pub fn count_syllables(word: &str, dict: Option<&PronunciationLexicon>) -> u32 {
    if let Some(n) = dict.and_then(|d| d.get(word)) {
        return n;
    }
    heuristic_syllables(word)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Counts maximal vowel groups (a e i o u, and y unless word-initial), then
/// drops one for a final silent `e` if that leaves at least one.
pub fn heuristic_syllables(word: &str) -> u32 {
    let letters: Vec<char> = word
        .chars()
        .filter(char::is_ascii_alphabetic)
        .map(|c| c.to_ascii_lowercase())
        .collect();
    if letters.is_empty() {
        return 1;
    }
    let mut groups = 0u32;
    let mut in_group = false;
    for (i, &c) in letters.iter().enumerate() {
        let vowel = is_vowel(c) && !(i == 0 && c == 'y');
        if vowel && !in_group {
            groups += 1;
        }
        in_group = vowel;
    }
    let n = letters.len();
    let silent_e = n >= 2 && letters[n - 1] == 'e' && !is_vowel(letters[n - 2]);
    if silent_e && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}
