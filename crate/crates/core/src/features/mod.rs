//! The 47-feature vector: registry, featurization and tabular export.

mod registry;
mod table;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coref::{coref_features, heuristic_chains, CorefNormalization};
use crate::corpus::{baseline_features, Annotation, Document, PronunciationLexicon, ResourcePaths, TokenizerConfig};
use crate::lexicon::{
    corpus_frequency_feature, search_count_feature, semantic_proportions, FrequencyTable, GradedLexicon, LemmaTable,
    LevelSchema, SynsetTable,
};
use crate::syntax::{
    grammar_features, load_patterns, parsing_features, starter_patterns, GrammarNormalization, GrammarPattern,
    ParseTree,
};
use crate::{Error, Result};

pub use registry::{Category, FeatureDescriptor, FeatureRegistry, Requirement, HEIGHT_CONVENTION, LOG_BASE};
pub use table::{export_table, read_table, read_table_from, write_table_to};

/// What to do for documents that arrive without trees.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeFallback {
    /// Mask parsing and grammar features.
    #[default]
    Mask,
    /// Use a flat `(S (X w1) (X w2) ...)` tree per sentence and flag it.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// sentence_length = ln|D| / n instead of |D| / n.
    pub sentence_length_log: bool,
    pub grammar_normalization: GrammarNormalization,
    pub coref_normalization: CorefNormalization,
    /// Truncate tree labels at the first `-` or `=` before matching.
    pub strip_suffixes: bool,
    pub tree_fallback: TreeFallback,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            sentence_length_log: false,
            grammar_normalization: GrammarNormalization::PerSentence,
            coref_normalization: CorefNormalization::PerSentence,
            strip_suffixes: true,
            tree_fallback: TreeFallback::Mask,
        }
    }
}

/// Every lexical resource a featurization may consult. All are optional;
/// features whose resource is absent are masked.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub tokenizer: TokenizerConfig,
    pub gept: Option<GradedLexicon>,
    pub vq: Option<GradedLexicon>,
    pub bnc: Option<FrequencyTable>,
    pub search_counts: Option<FrequencyTable>,
    pub synsets: Option<SynsetTable>,
    pub patterns: Vec<GrammarPattern>,
    pub pronunciations: Option<PronunciationLexicon>,
    pub lemmas: Option<LemmaTable>,
}

impl Resources {
    /// Loads whatever the paths name. Without a pattern file the bundled
    /// starter patterns are used. Returns load warnings alongside.
    pub fn load(paths: &ResourcePaths) -> Result<(Self, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut graded = |p: &Option<std::path::PathBuf>, schema: LevelSchema| -> Result<Option<GradedLexicon>> {
            p.as_deref()
                .map(|p| {
                    let loaded = GradedLexicon::load(p, schema)?;
                    if loaded.duplicate_warnings > 0 {
                        warnings.push(format!(
                            "{}: {} duplicate entries resolved to the easiest level",
                            p.display(),
                            loaded.duplicate_warnings
                        ));
                    }
                    Ok(loaded.lexicon)
                })
                .transpose()
        };
        let gept = graded(&paths.gept, LevelSchema::gept())?;
        let vq = graded(&paths.vq, LevelSchema::vq())?;
        let resources = Resources {
            tokenizer: paths.tokenizer_config()?,
            gept,
            vq,
            bnc: paths.bnc_frequency.as_deref().map(FrequencyTable::load).transpose()?,
            search_counts: paths.search_counts.as_deref().map(FrequencyTable::load).transpose()?,
            synsets: paths.synsets.as_deref().map(SynsetTable::load).transpose()?,
            patterns: match &paths.patterns {
                Some(p) => load_patterns(p)?,
                None => starter_patterns(),
            },
            pronunciations: paths.pronunciations.as_deref().map(PronunciationLexicon::load).transpose()?,
            lemmas: paths.lemmas.as_deref().map(LemmaTable::load).transpose()?,
        };
        Ok((resources, warnings))
    }

    fn has(&self, req: Requirement, trees: bool) -> bool {
        match req {
            Requirement::None => true,
            Requirement::Trees => trees,
            Requirement::GeptList => self.gept.is_some(),
            Requirement::VqList => self.vq.is_some(),
            Requirement::CorpusFrequency => self.bnc.is_some(),
            Requirement::SearchCounts => self.search_counts.is_some(),
            Requirement::Synsets => self.synsets.is_some(),
        }
    }
}

/// How a vector's values were obtained, beyond the values themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Coreference came from the string-match fallback.
    pub heuristic_coref: bool,
    /// Parsing and grammar features came from flat fallback trees.
    pub flat_trees: bool,
}

/// Feature values for one document, in registry order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub doc_id: String,
    pub values: Vec<f64>,
    /// true where the feature could not be computed; such values are 0.
    pub missing: Vec<bool>,
    pub grade: Option<i64>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl FeatureVector {
    pub fn get(&self, registry: &FeatureRegistry, name: &str) -> Option<f64> {
        let i = registry.index_of(name)?;
        (!self.missing[i]).then_some(self.values[i])
    }

    pub fn missing_names<'r>(&self, registry: &'r FeatureRegistry) -> Vec<&'r str> {
        registry
            .names()
            .zip(&self.missing)
            .filter(|(_, &m)| m)
            .map(|(n, _)| n)
            .collect()
    }
}

fn flat_trees(doc: &Document) -> Vec<ParseTree> {
    doc.sentences
        .iter()
        .map(|s| {
            ParseTree::node(
                "S",
                s.tokens.iter().map(|t| ParseTree::preterminal("X", t.surface.clone())).collect(),
            )
        })
        .collect()
}

/// Computes every registry feature for one document.
pub fn featurize(
    doc: &Document,
    resources: &Resources,
    config: &FeatureConfig,
    registry: &FeatureRegistry,
) -> Result<FeatureVector> {
    let wrap = |e| Error::in_document(&doc.id, e);
    let mut computed: HashMap<String, f64> = HashMap::with_capacity(47);
    let mut put = |name: &str, v: f64| {
        computed.insert(name.to_string(), v);
    };

    let base = baseline_features(doc, resources.pronunciations.as_ref(), config.sentence_length_log).map_err(wrap)?;
    put("word_number", base.word_number);
    put("sentence_length", base.sentence_length);
    put("syllables", base.syllables);

    for lex in [&resources.gept, &resources.vq].into_iter().flatten() {
        for (label, p) in lex.proportions(doc, resources.lemmas.as_ref()) {
            put(&label, p);
        }
    }
    if let Some(t) = &resources.bnc {
        put("bnc_frequency", corpus_frequency_feature(doc, t));
    }
    if let Some(t) = &resources.search_counts {
        put("google_search_count", search_count_feature(doc, t));
    }
    if let Some(t) = &resources.synsets {
        for (i, p) in semantic_proportions(doc, t).into_iter().enumerate() {
            put(&format!("wordnet{}", i + 1), p);
        }
    }

    let mut provenance = Provenance::default();
    let fallback;
    let trees = match (&doc.trees, config.tree_fallback) {
        (Some(t), _) => Some(t.as_slice()),
        (None, TreeFallback::Flat) => {
            provenance.flat_trees = true;
            fallback = flat_trees(doc);
            Some(fallback.as_slice())
        }
        (None, TreeFallback::Mask) => None,
    };
    if let Some(trees) = trees {
        let n = doc.sentence_count();
        let p = parsing_features(trees, n, config.strip_suffixes).map_err(wrap)?;
        put("tree_height", p.tree_height);
        put("np", p.np);
        put("vp", p.vp);
        put("sbar", p.sbar);
        put("pp", p.pp);
        let g = grammar_features(
            trees,
            &resources.patterns,
            n,
            doc.token_count,
            config.grammar_normalization,
            config.strip_suffixes,
        )
        .map_err(wrap)?;
        for (i, v) in g.into_iter().enumerate() {
            put(&format!("grammar{}", i + 1), v);
        }
    }

    let heuristic;
    let chains = match &doc.coref {
        Some(c) => c.as_slice(),
        None => {
            provenance.heuristic_coref = true;
            heuristic = heuristic_chains(doc);
            heuristic.as_slice()
        }
    };
    let c = coref_features(doc, chains, config.coref_normalization).map_err(wrap)?;
    put("pronoun", c.pronoun);
    put("proper_noun", c.proper_noun);
    put("antecedent", c.antecedent);
    put("corefer_chain", c.corefer_chain);
    put("corefer_distance", c.corefer_distance);

    let has_trees = trees.is_some();
    let mut values = Vec::with_capacity(registry.len());
    let mut missing = Vec::with_capacity(registry.len());
    for f in registry.features() {
        let value = computed.get(&f.name).copied();
        if value.is_none() && resources.has(f.requires, has_trees) {
            return Err(Error::Config(format!("registry feature '{}' is not computable", f.name)));
        }
        values.push(value.unwrap_or(0.0));
        missing.push(value.is_none());
    }
    Ok(FeatureVector {
        doc_id: doc.id.clone(),
        values,
        missing,
        grade: doc.grade,
        provenance,
    })
}

/// [`featurize`] over many documents in parallel; output order follows input.
pub fn featurize_all(
    docs: &[Document],
    resources: &Resources,
    config: &FeatureConfig,
    registry: &FeatureRegistry,
) -> Result<Vec<FeatureVector>> {
    docs.par_iter()
        .map(|d| featurize(d, resources, config, registry))
        .collect()
}

/// Corpus-level bookkeeping written next to a feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceReport {
    pub documents: usize,
    pub missing_trees_fraction: f64,
    pub missing_coref_fraction: f64,
    pub heuristic_coref_fraction: f64,
    pub flat_tree_fraction: f64,
    pub masked_feature_counts: Vec<(String, usize)>,
    pub per_document: Vec<DocumentProvenance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentProvenance {
    pub doc_id: String,
    pub missing_annotations: Vec<Annotation>,
    pub heuristic_coref: bool,
    pub flat_trees: bool,
    pub masked: Vec<String>,
}

pub fn provenance_report(docs: &[Document], vectors: &[FeatureVector], registry: &FeatureRegistry) -> ProvenanceReport {
    let n = docs.len().max(1) as f64;
    let frac = |k: usize| k as f64 / n;
    let masked_feature_counts = registry
        .names()
        .enumerate()
        .map(|(i, name)| (name.to_string(), vectors.iter().filter(|v| v.missing[i]).count()))
        .filter(|(_, c)| *c > 0)
        .collect();
    ProvenanceReport {
        documents: docs.len(),
        missing_trees_fraction: frac(docs.iter().filter(|d| !d.has(Annotation::Trees)).count()),
        missing_coref_fraction: frac(docs.iter().filter(|d| !d.has(Annotation::Coref)).count()),
        heuristic_coref_fraction: frac(vectors.iter().filter(|v| v.provenance.heuristic_coref).count()),
        flat_tree_fraction: frac(vectors.iter().filter(|v| v.provenance.flat_trees).count()),
        masked_feature_counts,
        per_document: docs
            .iter()
            .zip(vectors)
            .map(|(d, v)| DocumentProvenance {
                doc_id: d.id.clone(),
                missing_annotations: d.missing.iter().copied().collect(),
                heuristic_coref: v.provenance.heuristic_coref,
                flat_trees: v.provenance.flat_trees,
                masked: v.missing_names(registry).into_iter().map(String::from).collect(),
            })
            .collect(),
    }
}
