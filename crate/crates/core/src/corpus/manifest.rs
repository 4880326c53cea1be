use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{tokenize, Document, TokenizerConfig};
use crate::coref::load_coref_sidecar;
use crate::syntax::parse_tree_file;
use crate::{Error, Result};

/// Locations of every optional lexical resource.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourcePaths {
    pub gept: Option<PathBuf>,
    pub vq: Option<PathBuf>,
    pub bnc_frequency: Option<PathBuf>,
    pub search_counts: Option<PathBuf>,
    pub synsets: Option<PathBuf>,
    pub patterns: Option<PathBuf>,
    pub pronunciations: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub stop_words: Option<PathBuf>,
    pub pronouns: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
}

impl ResourcePaths {
    fn paths_mut(&mut self) -> [&mut Option<PathBuf>; 11] {
        [
            &mut self.gept,
            &mut self.vq,
            &mut self.bnc_frequency,
            &mut self.search_counts,
            &mut self.synsets,
            &mut self.patterns,
            &mut self.pronunciations,
            &mut self.lemmas,
            &mut self.stop_words,
            &mut self.pronouns,
            &mut self.abbreviations,
        ]
    }

    /// Rewrites relative paths against `base`.
    pub fn resolve_against(&mut self, base: &Path) {
        for p in self.paths_mut().into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn tokenizer_config(&self) -> Result<TokenizerConfig> {
        TokenizerConfig::from_files(
            self.abbreviations.as_deref(),
            self.stop_words.as_deref(),
            self.pronouns.as_deref(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub path: PathBuf,
    pub grade: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coref: Option<PathBuf>,
}

impl ManifestEntry {
    /// Explicit id, else the file stem of the document path.
    pub fn doc_id(&self) -> String {
        self.id.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.path.display().to_string())
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub documents: Vec<ManifestEntry>,
    #[serde(default)]
    pub resources: ResourcePaths,
}

#[derive(Deserialize)]
struct RawEntry {
    #[serde(default)]
    id: Option<String>,
    path: PathBuf,
    grade: serde_json::Value,
    #[serde(default)]
    tree: Option<PathBuf>,
    #[serde(default)]
    coref: Option<PathBuf>,
}

#[derive(Deserialize)]
struct RawManifest {
    documents: Vec<RawEntry>,
    #[serde(default)]
    resources: ResourcePaths,
}

impl CorpusManifest {
    /// Parses manifest JSON; relative paths resolve against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let raw: RawManifest =
            serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        let mut documents = Vec::with_capacity(raw.documents.len());
        for (i, e) in raw.documents.into_iter().enumerate() {
            let grade = e.grade.as_i64().ok_or_else(|| {
                Error::Manifest(format!(
                    "entry {i} ({}): grade {} is not an integer",
                    e.path.display(),
                    e.grade
                ))
            })?;
            let rel = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
            documents.push(ManifestEntry {
                id: e.id,
                path: rel(e.path),
                grade,
                tree: e.tree.map(rel),
                coref: e.coref.map(rel),
            });
        }
        let mut resources = raw.resources;
        resources.resolve_against(base);
        Ok(CorpusManifest {
            documents,
            resources,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_json(&text, base)
    }
}

/// Reads, tokenizes and annotates every manifest entry, in manifest order.
/// Absent sidecars are recorded in each document's `missing` set.
pub fn load_corpus(manifest: &CorpusManifest, tokenizer: &TokenizerConfig) -> Result<Vec<Document>> {
    manifest
        .documents
        .par_iter()
        .map(|entry| load_entry(entry, tokenizer))
        .collect()
}

fn load_entry(entry: &ManifestEntry, tokenizer: &TokenizerConfig) -> Result<Document> {
    let id = entry.doc_id();
    let text = std::fs::read_to_string(&entry.path).map_err(|e| Error::load(&entry.path, e))?;
    let wrap = |e| Error::in_document(&id, e);
    let mut doc = tokenize(&id, &text, tokenizer).map_err(wrap)?.with_grade(entry.grade);
    if let Some(tree_path) = &entry.tree {
        let trees = parse_tree_file(tree_path).map_err(wrap)?;
        doc.attach_trees(trees);
    }
    if let Some(coref_path) = &entry.coref {
        let chains = load_coref_sidecar(coref_path, &doc).map_err(wrap)?;
        doc.attach_coref(chains);
    }
    Ok(doc)
}
