use std::collections::HashMap;
use std::path::Path;

use super::parse_tsv_pairs;
use crate::corpus::Document;
use crate::{Error, Result};

/// Occurrence counts of words in a reference source (a corpus, or search
/// result counts).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    pub source: String,
    map: HashMap<String, u64>,
    pub total_tokens: u64,
}

impl FrequencyTable {
    /// `word<TAB>count` lines with an optional `#total<TAB>N` header. Without
    /// the header the total is the sum of the listed counts (at least 1).
    pub fn parse(source: &str, text: &str) -> Result<Self> {
        let mut total = None;
        let mut body = String::with_capacity(text.len());
        for (i, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix("#total\t") {
                let n: u64 = rest.trim().parse().map_err(|_| Error::Schema {
                    path: source.to_string(),
                    line: i + 1,
                    message: format!("bad total '{rest}'"),
                })?;
                total = Some(n);
                body.push('\n');
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut map = HashMap::new();
        for (line, word, count) in parse_tsv_pairs(&body, source)? {
            let n: u64 = count
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::Schema {
                    path: source.to_string(),
                    line,
                    message: format!("count '{count}' is not a positive integer"),
                })?;
            *map.entry(word.to_lowercase()).or_insert(0) += n;
        }
        let max = map.values().copied().max().unwrap_or(0);
        let total_tokens = match total {
            Some(t) if t < max => {
                return Err(Error::Schema {
                    path: source.to_string(),
                    line: 1,
                    message: format!("#total {t} is below the largest count {max}"),
                })
            }
            Some(t) => t.max(1),
            None => map.values().sum::<u64>().max(1),
        };
        Ok(FrequencyTable {
            source: source.to_string(),
            map,
            total_tokens,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn count(&self, word: &str) -> u64 {
        self.map.get(word).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Returned in place of ln(0): ln(1 / total) - 1.
    pub fn floor_value(&self) -> f64 {
        (1.0 / self.total_tokens as f64).ln() - 1.0
    }

    fn log_mean(&self, doc: &Document, weight: impl Fn(u64) -> f64) -> f64 {
        let words = doc.content_words();
        if words.is_empty() {
            return self.floor_value();
        }
        let sum: f64 = words.iter().map(|w| weight(self.count(w))).sum();
        if sum <= 0.0 {
            return self.floor_value();
        }
        (sum / words.len() as f64).ln()
    }
}

/// ln of the mean relative corpus frequency n/total over the document's
/// distinct non-stop words. Unlisted words contribute zero.
pub fn corpus_frequency_feature(doc: &Document, table: &FrequencyTable) -> f64 {
    let total = table.total_tokens as f64;
    table.log_mean(doc, |n| n as f64 / total)
}

/// ln of the mean raw count over the document's distinct non-stop words.
pub fn search_count_feature(doc: &Document, table: &FrequencyTable) -> f64 {
    table.log_mean(doc, |n| n as f64)
}
