//! Coreference chains: sidecar ingestion, a string-match fallback, and the
//! five coreference features.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MentionKind {
    Pronoun,
    #[serde(alias = "properNoun")]
    ProperNoun,
    Nominal,
}

/// A token span inside one sentence; `end` is inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mention {
    #[serde(rename = "sentence")]
    pub sentence_index: usize,
    #[serde(rename = "start")]
    pub token_start: usize,
    #[serde(rename = "end")]
    pub token_end: usize,
    pub kind: MentionKind,
}

impl Mention {
    fn position(&self) -> (usize, usize) {
        (self.sentence_index, self.token_start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorefChain {
    /// First mention in document order.
    pub antecedent: Mention,
    /// Later mentions, in document order.
    pub anaphora: Vec<Mention>,
    /// Produced by [`heuristic_chains`] rather than an annotation file.
    #[serde(default)]
    pub heuristic: bool,
}

impl CorefChain {
    /// Orders the mentions; the earliest becomes the antecedent.
    pub fn from_mentions(mut mentions: Vec<Mention>, heuristic: bool) -> Option<Self> {
        mentions.sort_by_key(Mention::position);
        let mut it = mentions.into_iter();
        let antecedent = it.next()?;
        Some(CorefChain {
            antecedent,
            anaphora: it.collect(),
            heuristic,
        })
    }
}

/// Reads a JSON array of chains, each an array of
/// `{sentence, start, end, kind}` mentions, and checks every span against
/// the document.
pub fn load_coref_sidecar(path: &Path, doc: &Document) -> Result<Vec<CorefChain>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
    parse_coref_sidecar(&text, doc)
}

pub fn parse_coref_sidecar(text: &str, doc: &Document) -> Result<Vec<CorefChain>> {
    let raw: Vec<Vec<Mention>> = serde_json::from_str(text)?;
    let mut chains = Vec::with_capacity(raw.len());
    for (chain_id, mentions) in raw.into_iter().enumerate() {
        for m in &mentions {
            let len = doc.sentences.get(m.sentence_index).map(|s| s.tokens.len());
            let valid = matches!(len, Some(len) if m.token_start <= m.token_end && m.token_end < len);
            if !valid {
                return Err(Error::AnnotationMismatch(format!(
                    "chain {chain_id}: span {}..={} in sentence {} is outside the document",
                    m.token_start, m.token_end, m.sentence_index
                )));
            }
        }
        let chain = CorefChain::from_mentions(mentions, false)
            .ok_or_else(|| Error::AnnotationMismatch(format!("chain {chain_id} has no mentions")))?;
        chains.push(chain);
    }
    Ok(chains)
}

/// Pronouns eligible to attach to a named antecedent.
const THIRD_PERSON: &[&str] = &[
    "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself", "they",
    "them", "their", "theirs", "themselves",
];

/// How many sentences back a pronoun may look for its antecedent.
const PRONOUN_WINDOW: usize = 3;

/// String-match fallback for documents without a coreference sidecar.
///
/// Runs of consecutive name tokens form mentions. Name tokens are tokens
/// flagged as proper nouns plus capitalized sentence-initial tokens that are
/// neither stop words nor pronouns. Mentions with the same case-folded
/// string share a chain. A third-person pronoun joins the chain of the
/// nearest preceding name mention at most three sentences back. Chains
/// without anaphora are dropped.
pub fn heuristic_chains(doc: &Document) -> Vec<CorefChain> {
    let mut names: BTreeMap<String, Vec<Mention>> = BTreeMap::new();
    let mut last_name: Option<(usize, String)> = None;

    for sentence in &doc.sentences {
        let tokens = &sentence.tokens;
        let mut i = 0;
        while i < tokens.len() {
            let is_name = |j: usize| {
                let t = &tokens[j];
                t.is_proper_noun
                    || (j == 0
                        && !t.is_stop_word
                        && !t.is_pronoun
                        && t.surface.chars().next().is_some_and(char::is_uppercase))
            };
            if is_name(i) {
                let start = i;
                while i + 1 < tokens.len() && tokens[i + 1].is_proper_noun {
                    i += 1;
                }
                let key = tokens[start..=i]
                    .iter()
                    .map(|t| t.normalized.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                names.entry(key.clone()).or_default().push(Mention {
                    sentence_index: sentence.index,
                    token_start: start,
                    token_end: i,
                    kind: MentionKind::ProperNoun,
                });
                last_name = Some((sentence.index, key));
            } else if tokens[i].is_pronoun && THIRD_PERSON.contains(&tokens[i].normalized.as_str()) {
                if let Some((at, key)) = &last_name {
                    if sentence.index - at <= PRONOUN_WINDOW {
                        names.get_mut(key).expect("name recorded").push(Mention {
                            sentence_index: sentence.index,
                            token_start: i,
                            token_end: i,
                            kind: MentionKind::Pronoun,
                        });
                    }
                }
            }
            i += 1;
        }
    }

    let mut chains: Vec<CorefChain> = names
        .into_values()
        .filter_map(|m| CorefChain::from_mentions(m, true))
        .filter(|c| !c.anaphora.is_empty())
        .collect();
    chains.sort_by_key(|c| c.antecedent.position());
    chains
}

/// Whether pronoun and proper-noun counts are divided by sentence count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorefNormalization {
    #[default]
    PerSentence,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorefFeatures {
    pub pronoun: f64,
    pub proper_noun: f64,
    pub antecedent: f64,
    pub corefer_chain: f64,
    pub corefer_distance: f64,
}

pub fn coref_features(doc: &Document, chains: &[CorefChain], normalization: CorefNormalization) -> Result<CorefFeatures> {
    if doc.sentences.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let denom = match normalization {
        CorefNormalization::PerSentence => doc.sentence_count() as f64,
        CorefNormalization::Raw => 1.0,
    };
    let pronouns = doc.tokens().filter(|t| t.is_pronoun).count() as f64;
    let proper = doc.tokens().filter(|t| t.is_proper_noun).count() as f64;

    let anaphora: usize = chains.iter().map(|c| c.anaphora.len()).sum();
    let corefer_chain = if chains.is_empty() {
        0.0
    } else {
        anaphora as f64 / chains.len() as f64
    };
    let distance_sum: usize = chains
        .iter()
        .flat_map(|c| {
            c.anaphora
                .iter()
                .map(move |a| a.sentence_index.saturating_sub(c.antecedent.sentence_index))
        })
        .sum();
    let corefer_distance = if anaphora == 0 {
        0.0
    } else {
        distance_sum as f64 / anaphora as f64
    };
    Ok(CorefFeatures {
        pronoun: pronouns / denom,
        proper_noun: proper / denom,
        antecedent: chains.len() as f64,
        corefer_chain,
        corefer_distance,
    })
}
