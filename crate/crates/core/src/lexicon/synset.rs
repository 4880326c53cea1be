use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use super::parse_tsv_pairs;
use crate::corpus::Document;
use crate::{Error, Result};

pub const SYNSET_BUCKETS: usize = 7;

/// Number of synsets (senses) per word.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynsetTable {
    map: HashMap<String, u32>,
}

impl SynsetTable {
    /// `word<TAB>count` lines; counts must be at least 1.
    pub fn parse(source: &str, text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (line, word, count) in parse_tsv_pairs(text, source)? {
            let n: u32 = count.parse().ok().filter(|&n| n >= 1).ok_or_else(|| Error::Schema {
                path: source.to_string(),
                line,
                message: format!("synset count '{count}' is not a positive integer"),
            })?;
            map.insert(word.to_lowercase(), n);
        }
        Ok(SynsetTable { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
        Self::parse(&path.display().to_string(), &text)
    }

    /// Builds the table from lexical-database `index.<pos>` files, summing
    /// each lemma's synset count over parts of speech. Multi-word lemmas
    /// (`ice_cream`) are skipped since tokens never contain spaces.
    pub fn from_wordnet_index(texts: &[&str]) -> Self {
        let mut map: HashMap<String, u32> = HashMap::new();
        for text in texts {
            for line in text.lines() {
                if line.starts_with(' ') || line.trim().is_empty() {
                    continue;
                }
                let mut fields = line.split_whitespace();
                let (Some(lemma), Some(_pos), Some(count)) = (fields.next(), fields.next(), fields.next()) else {
                    continue;
                };
                if lemma.contains('_') {
                    continue;
                }
                if let Ok(n) = count.parse::<u32>() {
                    if n > 0 {
                        *map.entry(lemma.to_lowercase()).or_insert(0) += n;
                    }
                }
            }
        }
        SynsetTable { map }
    }

    /// Sorted `word<TAB>count` lines.
    pub fn to_tsv(&self) -> String {
        let sorted: BTreeMap<&String, &u32> = self.map.iter().collect();
        sorted.into_iter().map(|(w, n)| format!("{w}\t{n}\n")).collect()
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.map.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// floor(sqrt(ws)), saturating at 7.
pub fn synset_bucket(ws: i64) -> Result<usize> {
    if ws <= 0 {
        return Err(Error::Domain(format!("synset count {ws} must be positive")));
    }
    Ok((ws.isqrt() as usize).min(SYNSET_BUCKETS))
}

/// Share of distinct words in wordnet1..wordnet7. Words without a synset
/// entry belong to no bucket, so the shares may sum to less than one.
pub fn semantic_proportions(doc: &Document, table: &SynsetTable) -> [f64; SYNSET_BUCKETS] {
    let mut counts = [0usize; SYNSET_BUCKETS];
    for w in &doc.distinct_words {
        if let Some(ws) = table.get(w) {
            let b = synset_bucket(i64::from(ws)).expect("table counts are positive");
            counts[b - 1] += 1;
        }
    }
    let m = doc.distinct_count().max(1) as f64;
    counts.map(|c| c as f64 / m)
}
