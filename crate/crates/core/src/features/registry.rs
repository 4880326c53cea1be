use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Baseline,
    Aoa,
    Frequency,
    Parsing,
    Grammar,
    Semantic,
    Coreference,
}

/// What must be present for a feature to be computed rather than masked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    None,
    Trees,
    GeptList,
    VqList,
    CorpusFrequency,
    SearchCounts,
    Synsets,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub name: String,
    pub category: Category,
    pub requires: Requirement,
}

/// Ordered, uniquely named feature list. Models store the registry hash so
/// coefficients are never applied to a differently ordered vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureRegistry {
    features: Vec<FeatureDescriptor>,
    index: HashMap<String, usize>,
}

/// Natural log everywhere a logarithm is taken.
pub const LOG_BASE: &str = "e";
/// Tree height counts edges from the root down to the deepest terminal.
pub const HEIGHT_CONVENTION: &str = "edges-root-to-terminal";

impl Default for FeatureRegistry {
    fn default() -> Self {
        use Category::*;
        use Requirement as R;
        let mut f: Vec<(String, Category, Requirement)> = Vec::with_capacity(47);
        for name in ["word_number", "sentence_length", "syllables"] {
            f.push((name.into(), Baseline, R::None));
        }
        for i in 0..=3 {
            f.push((format!("gept{i}"), Aoa, R::GeptList));
        }
        f.push(("vq0".into(), Aoa, R::VqList));
        for i in 3..=16 {
            f.push((format!("vq{i}"), Aoa, R::VqList));
        }
        f.push(("bnc_frequency".into(), Frequency, R::CorpusFrequency));
        f.push(("google_search_count".into(), Frequency, R::SearchCounts));
        for name in ["tree_height", "np", "vp", "sbar", "pp"] {
            f.push((name.into(), Parsing, R::Trees));
        }
        for i in 1..=6 {
            f.push((format!("grammar{i}"), Grammar, R::Trees));
        }
        for i in 1..=7 {
            f.push((format!("wordnet{i}"), Semantic, R::Synsets));
        }
        for name in ["pronoun", "proper_noun", "antecedent", "corefer_chain", "corefer_distance"] {
            f.push((name.into(), Coreference, R::None));
        }
        FeatureRegistry::new(
            f.into_iter()
                .map(|(name, category, requires)| FeatureDescriptor { name, category, requires })
                .collect(),
        )
        .expect("default names are unique")
    }
}

impl FeatureRegistry {
    /// Fails on duplicate names.
    pub fn new(features: Vec<FeatureDescriptor>) -> Result<Self, String> {
        let mut index = HashMap::with_capacity(features.len());
        for (i, f) in features.iter().enumerate() {
            if index.insert(f.name.clone(), i).is_some() {
                return Err(format!("duplicate feature name '{}'", f.name));
            }
        }
        Ok(FeatureRegistry { features, index })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureDescriptor] {
        &self.features
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn in_category(&self, category: Category) -> Vec<&str> {
        self.features
            .iter()
            .filter(|f| f.category == category)
            .map(|f| f.name.as_str())
            .collect()
    }

    /// Hex SHA-256 over names, categories and requirements in order, plus the
    /// log-base and tree-height conventions.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("log={LOG_BASE};height={HEIGHT_CONVENTION}\n"));
        for f in &self.features {
            h.update(format!("{}\t{:?}\t{:?}\n", f.name, f.category, f.requires));
        }
        hex::encode(h.finalize())
    }
}
