//! Word-level resources: graded word lists (age of acquisition), corpus and
//! search-count frequencies, and synset counts.

mod frequency;
mod synset;

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::{Error, Result};

pub use frequency::{corpus_frequency_feature, search_count_feature, FrequencyTable};
pub use synset::{semantic_proportions, synset_bucket, SynsetTable, SYNSET_BUCKETS};

/// The label set of a graded word list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSchema {
    /// Label for words the list does not contain.
    pub out_of_list: String,
    /// Easiest first.
    pub levels: Vec<String>,
}

impl LevelSchema {
    /// gept0 plus elementary, intermediate and high-intermediate.
    pub fn gept() -> Self {
        LevelSchema {
            out_of_list: "gept0".into(),
            levels: (1..=3).map(|i| format!("gept{i}")).collect(),
        }
    }

    /// vq0 plus the fourteen levels vq3..vq16.
    pub fn vq() -> Self {
        LevelSchema {
            out_of_list: "vq0".into(),
            levels: (3..=16).map(|i| format!("vq{i}")).collect(),
        }
    }

    /// Out-of-list label first, then the levels in order.
    pub fn all_labels(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.out_of_list.as_str()).chain(self.levels.iter().map(String::as_str))
    }
}

/// Surface form -> lemma, consulted only for lexicon lookups.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaTable {
    map: HashMap<String, String>,
}

impl LemmaTable {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let map = parse_tsv_pairs(text, source)?
            .into_iter()
            .map(|(_, surface, lemma)| (surface.to_lowercase(), lemma.to_lowercase()))
            .collect();
        Ok(LemmaTable { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn lemma<'a>(&'a self, word: &'a str) -> &'a str {
        self.map.get(word).map_or(word, String::as_str)
    }
}

/// `(line, first, second)` for every `a<TAB>b` line; blank and `#` lines skipped.
pub(crate) fn parse_tsv_pairs<'a>(text: &'a str, source: &str) -> Result<Vec<(usize, &'a str, &'a str)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((a, b)) = line.split_once('\t') else {
            return Err(Error::Schema {
                path: source.to_string(),
                line: i + 1,
                message: "expected two tab-separated fields".into(),
            });
        };
        out.push((i + 1, a.trim(), b.trim()));
    }
    Ok(out)
}

/// A word list assigning each listed word one difficulty level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedLexicon {
    pub name: String,
    pub schema: LevelSchema,
    /// word -> index into `schema.levels`
    map: HashMap<String, usize>,
}

/// A loaded lexicon plus the number of duplicate entries that were merged.
#[derive(Debug, Clone)]
pub struct LoadedLexicon {
    pub lexicon: GradedLexicon,
    pub duplicate_warnings: usize,
}

impl GradedLexicon {
    /// Parses `word<TAB>level` lines. A word listed more than once keeps its
    /// easiest level; each such repeat counts as one warning.
    pub fn parse(name: &str, text: &str, schema: LevelSchema) -> Result<LoadedLexicon> {
        let mut map: HashMap<String, usize> = HashMap::new();
        let mut warnings = 0;
        for (line, word, label) in parse_tsv_pairs(text, name)? {
            let level = schema.levels.iter().position(|l| l == label).ok_or_else(|| Error::Schema {
                path: name.to_string(),
                line,
                message: format!("unknown level '{label}'"),
            })?;
            match map.entry(word.to_lowercase()) {
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(level);
                }
                std::collections::hash_map::Entry::Occupied(mut o) => {
                    warnings += 1;
                    if level < *o.get() {
                        o.insert(level);
                    }
                }
            }
        }
        Ok(LoadedLexicon {
            lexicon: GradedLexicon {
                name: name.to_string(),
                schema,
                map,
            },
            duplicate_warnings: warnings,
        })
    }

    pub fn load(path: &Path, schema: LevelSchema) -> Result<LoadedLexicon> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
        Self::parse(&path.display().to_string(), &text, schema)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Level label for a word; unlisted words get the out-of-list label.
    pub fn level_of(&self, word: &str) -> &str {
        match self.map.get(word) {
            Some(&i) => &self.schema.levels[i],
            None => &self.schema.out_of_list,
        }
    }

    /// Share of the document's distinct words at each level, out-of-list
    /// level first. The shares sum to one.
    pub fn proportions(&self, doc: &Document, lemmas: Option<&LemmaTable>) -> Vec<(String, f64)> {
        let mut counts = vec![0usize; self.schema.levels.len() + 1];
        for w in &doc.distinct_words {
            let key = lemmas.map_or(w.as_str(), |l| l.lemma(w));
            let slot = self.map.get(key).map_or(0, |&i| i + 1);
            counts[slot] += 1;
        }
        let m = doc.distinct_count().max(1) as f64;
        self.schema
            .all_labels()
            .zip(counts)
            .map(|(label, c)| (label.to_string(), c as f64 / m))
            .collect()
    }
}

/// Free-function form of [`GradedLexicon::proportions`].
pub fn aoa_proportions(doc: &Document, lex: &GradedLexicon) -> Vec<(String, f64)> {
    lex.proportions(doc, None)
}
