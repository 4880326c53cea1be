//! Synthetic graded corpora.
//!
//! Documents are built from pseudo-words whose acquisition level, length,
//! frequency and polysemy track the target grade, with parse trees and
//! coreference chains generated alongside the text. Higher grades get
//! longer documents, harder words, deeper trees and longer-range pronouns,
//! so feature signs follow the usual pattern (word count, hard-word shares
//! and tree height up; easy-word shares down).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::Serialize;

use crate::coref::{parse_coref_sidecar, Mention, MentionKind};
use crate::corpus::{tokenize, Document, TokenizerConfig};
use crate::features::Resources;
use crate::lexicon::{FrequencyTable, GradedLexicon, LevelSchema, SynsetTable};
use crate::model::Dataset;
use crate::syntax::{starter_patterns, ParseTree};
use crate::Result;

const CONSONANTS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"];
const VOWELS: &[&str] = &["a", "i", "o", "u"];
const LEVELS: usize = 6;
const NOUNS_PER_LEVEL: usize = 60;
const VERBS_PER_LEVEL: usize = 30;
const ADJS_PER_LEVEL: usize = 25;
const NAMES: usize = 24;
/// Total token count written into the corpus-frequency table header.
const CORPUS_TOTAL: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthConfig {
    pub grades: Vec<i64>,
    pub docs_per_grade: usize,
    pub seed: u64,
    /// Share of documents written with a tree sidecar.
    pub tree_fraction: f64,
    /// Share of documents written with a coreference sidecar.
    pub coref_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            grades: (1..=6).collect(),
            docs_per_grade: 40,
            seed: 7,
            tree_fraction: 1.0,
            coref_fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Noun,
    Verb,
    Adj,
}

#[derive(Debug, Clone)]
struct Word {
    text: String,
    /// Acquisition level, 1 (easiest) to 6.
    level: usize,
}

struct Vocabulary {
    nouns: Vec<Vec<Word>>,
    verbs: Vec<Vec<Word>>,
    adjs: Vec<Vec<Word>>,
    names: Vec<String>,
}

fn pseudo_word(rng: &mut ChaCha8Rng, syllables: usize) -> String {
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(CONSONANTS.choose(rng).expect("non-empty"));
        w.push_str(VOWELS.choose(rng).expect("non-empty"));
    }
    w
}

impl Vocabulary {
    fn generate(rng: &mut ChaCha8Rng, tokenizer: &TokenizerConfig) -> Self {
        let mut taken: BTreeSet<String> = BTreeSet::new();
        let reserved = |w: &str, tokenizer: &TokenizerConfig| {
            tokenizer.stop_words.contains(w)
                || tokenizer.pronouns.contains(w)
                || tokenizer.abbreviations.iter().any(|a| a.trim_end_matches('.').eq_ignore_ascii_case(w))
        };
        let mut fresh = |rng: &mut ChaCha8Rng, syllables: usize| {
            let mut attempts = 0;
            loop {
                // short forms run out quickly; lengthen after repeated collisions
                let w = pseudo_word(rng, syllables + attempts / 20);
                if !reserved(&w, tokenizer) && taken.insert(w.clone()) {
                    break w;
                }
                attempts += 1;
            }
        };
        let mut bank = |rng: &mut ChaCha8Rng, per_level: usize| -> Vec<Vec<Word>> {
            (1..=LEVELS)
                .map(|level| {
                    (0..per_level)
                        .map(|_| {
                            let syllables = 1 + level / 2 + usize::from(rng.random_bool(0.4));
                            Word {
                                text: fresh(rng, syllables.min(4)),
                                level,
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let nouns = bank(rng, NOUNS_PER_LEVEL);
        let verbs = bank(rng, VERBS_PER_LEVEL);
        let adjs = bank(rng, ADJS_PER_LEVEL);
        let names = (0..NAMES)
            .map(|_| {
                let w = fresh(rng, 2);
                let mut c = w.chars();
                let first = c.next().expect("non-empty").to_ascii_uppercase();
                std::iter::once(first).chain(c).collect()
            })
            .collect();
        Vocabulary { nouns, verbs, adjs, names }
    }

    fn all(&self) -> impl Iterator<Item = &Word> {
        self.nouns.iter().chain(&self.verbs).chain(&self.adjs).flatten()
    }

    fn pick(&self, rng: &mut ChaCha8Rng, pos: Pos, level: usize) -> &str {
        let bank = match pos {
            Pos::Noun => &self.nouns,
            Pos::Verb => &self.verbs,
            Pos::Adj => &self.adjs,
        };
        &bank[level - 1].choose(rng).expect("non-empty").text
    }
}

/// One generated document with its annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthDocument {
    pub id: String,
    pub grade: i64,
    pub text: String,
    pub trees: Vec<ParseTree>,
    /// Chains as mention lists, in sidecar form.
    pub chains: Vec<Vec<Mention>>,
    pub has_tree_sidecar: bool,
    pub has_coref_sidecar: bool,
}

/// A generated corpus plus the resource tables describing its vocabulary.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub config: SynthConfig,
    pub documents: Vec<SynthDocument>,
    pub gept_tsv: String,
    pub vq_tsv: String,
    pub bnc_tsv: String,
    pub search_tsv: String,
    pub synsets_tsv: String,
}

struct DocBuilder<'a> {
    rng: &'a mut ChaCha8Rng,
    vocab: &'a Vocabulary,
    /// Difficulty on a 1..6 scale.
    d: f64,
}

impl DocBuilder<'_> {
    fn level(&mut self) -> usize {
        let n = Normal::new(0.85 * self.d + 0.3, 1.0).expect("valid sigma");
        (n.sample(self.rng).round() as i64).clamp(1, LEVELS as i64) as usize
    }

    fn word(&mut self, pos: Pos) -> String {
        let level = self.level();
        self.vocab.pick(self.rng, pos, level).to_string()
    }

    fn simple_np(&mut self) -> ParseTree {
        let mut kids = vec![ParseTree::preterminal("DT", if self.rng.random_bool(0.6) { "the" } else { "a" })];
        if self.rng.random_bool((0.1 + 0.06 * self.d).min(0.9)) {
            kids.push(ParseTree::preterminal("JJ", self.word(Pos::Adj)));
        }
        kids.push(ParseTree::preterminal("NN", self.word(Pos::Noun)));
        ParseTree::node("NP", kids)
    }

    fn pp(&mut self) -> ParseTree {
        let prep = *["in", "on", "with", "from"].choose(self.rng).expect("non-empty");
        ParseTree::node("PP", vec![ParseTree::preterminal("IN", prep), self.simple_np()])
    }

    fn object_np(&mut self) -> ParseTree {
        let np = self.simple_np();
        if self.rng.random_bool((0.05 + 0.07 * self.d).min(0.9)) {
            let pp = self.pp();
            ParseTree::node("NP", vec![np, pp])
        } else {
            np
        }
    }

    fn vp(&mut self, depth: usize) -> ParseTree {
        let mut kids = vec![ParseTree::preterminal("VBD", self.word(Pos::Verb)), self.object_np()];
        if self.rng.random_bool((0.05 + 0.06 * self.d).min(0.9)) {
            kids.push(self.pp());
        }
        if depth == 0 && self.rng.random_bool((0.02 + 0.07 * self.d).min(0.9)) {
            let comp = *["that", "because", "while"].choose(self.rng).expect("non-empty");
            let subject = self.simple_np();
            let inner = self.vp(depth + 1);
            kids.push(ParseTree::node(
                "SBAR",
                vec![ParseTree::preterminal("IN", comp), ParseTree::node("S", vec![subject, inner])],
            ));
        }
        ParseTree::node("VP", kids)
    }
}

fn capitalize_first_leaf(tree: &mut ParseTree) -> bool {
    match tree {
        ParseTree::Terminal(w) => {
            let mut c = w.chars();
            if let Some(first) = c.next() {
                *w = first.to_uppercase().chain(c).collect();
            }
            true
        }
        ParseTree::Node { children, .. } => children.iter_mut().any(capitalize_first_leaf),
    }
}

impl SynthCorpus {
    pub fn generate(config: &SynthConfig) -> Self {
        let tokenizer = TokenizerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let vocab = Vocabulary::generate(&mut rng, &tokenizer);
        let (gmin, gmax) = (
            config.grades.iter().copied().min().unwrap_or(1),
            config.grades.iter().copied().max().unwrap_or(1),
        );
        let span = (gmax - gmin).max(1) as f64;

        let mut documents = Vec::new();
        for &grade in &config.grades {
            let d = 1.0 + 5.0 * (grade - gmin) as f64 / span;
            for k in 0..config.docs_per_grade {
                let id = format!("g{grade}_{k:03}");
                let doc = Self::document(&mut rng, &vocab, id, grade, d, config);
                documents.push(doc);
            }
        }

        let mut gept = String::from("# synthetic GEPT-style list\n");
        let mut vq = String::from("# synthetic VQ-style list\n");
        let mut bnc = format!("#total\t{CORPUS_TOTAL}\n");
        let mut search = String::new();
        let mut synsets = String::new();
        let noise = |rng: &mut ChaCha8Rng, s: f64| -> f64 { s * rng.sample::<f64, _>(StandardNormal) };
        let mut words: Vec<&Word> = vocab.all().collect();
        words.sort_by(|a, b| a.text.cmp(&b.text));
        for w in words {
            let l = w.level as f64;
            if w.level < LEVELS || rng.random_bool(0.2) {
                let g = match w.level {
                    1 | 2 => 1,
                    3 | 4 => 2,
                    _ => 3,
                };
                gept.push_str(&format!("{}\tgept{g}\n", w.text));
            }
            if !rng.random_bool(0.05) {
                let v = (3 + 2 * (w.level as i64 - 1) + i64::from(rng.random_bool(0.5)) + i64::from(w.level == LEVELS))
                    .clamp(3, 16);
                vq.push_str(&format!("{}\tvq{v}\n", w.text));
            }
            let f = (13.0 - 1.4 * l + noise(&mut rng, 1.0)).exp().round().max(1.0) as u64;
            bnc.push_str(&format!("{}\t{f}\n", w.text));
            let s = (16.0 - 0.6 * l + noise(&mut rng, 2.0)).exp().round().max(1.0) as u64;
            search.push_str(&format!("{}\t{s}\n", w.text));
            let ws = (2.6 - 0.3 * l + noise(&mut rng, 0.5)).exp().round().max(1.0) as u64;
            synsets.push_str(&format!("{}\t{ws}\n", w.text));
        }
        SynthCorpus {
            config: config.clone(),
            documents,
            gept_tsv: gept,
            vq_tsv: vq,
            bnc_tsv: bnc,
            search_tsv: search,
            synsets_tsv: synsets,
        }
    }

    fn document(
        rng: &mut ChaCha8Rng,
        vocab: &Vocabulary,
        id: String,
        grade: i64,
        d: f64,
        config: &SynthConfig,
    ) -> SynthDocument {
        let sentences = (3.0 + 1.6 * d + 1.2 * rng.sample::<f64, _>(StandardNormal)).round().max(2.0) as usize;
        let name = vocab.names.choose(rng).expect("non-empty").clone();
        let pronoun = if rng.random_bool(0.5) { "he" } else { "she" };
        // how many sentences a pronoun may reach back
        let reach = 1 + (d / 2.0).floor() as usize;
        let mut trees = Vec::with_capacity(sentences);
        let mut mentions: Vec<Mention> = Vec::new();
        let mut last_name: Option<usize> = None;
        let mut b = DocBuilder { rng, vocab, d };
        for s in 0..sentences {
            let recent = last_name.is_some_and(|l| s - l <= reach);
            let subject = if recent && b.rng.random_bool(0.6) {
                mentions.push(Mention {
                    sentence_index: s,
                    token_start: 0,
                    token_end: 0,
                    kind: MentionKind::Pronoun,
                });
                ParseTree::node("NP", vec![ParseTree::preterminal("PRP", pronoun)])
            } else if b.rng.random_bool(0.35) {
                mentions.push(Mention {
                    sentence_index: s,
                    token_start: 0,
                    token_end: 0,
                    kind: MentionKind::ProperNoun,
                });
                last_name = Some(s);
                ParseTree::node("NP", vec![ParseTree::preterminal("NNP", name.clone())])
            } else {
                b.simple_np()
            };
            let vp = b.vp(0);
            let mut tree = ParseTree::node("S", vec![subject, vp, ParseTree::preterminal(".", ".")]);
            capitalize_first_leaf(&mut tree);
            trees.push(tree);
        }
        let text = trees
            .iter()
            .map(|t| {
                let words: Vec<&str> = t.yield_words();
                let (last, body) = words.split_last().expect("non-empty sentence");
                debug_assert_eq!(*last, ".");
                format!("{}.", body.join(" "))
            })
            .collect::<Vec<_>>()
            .join(" ");
        let chains = if mentions.len() >= 2 && mentions.iter().any(|m| m.kind == MentionKind::ProperNoun) {
            // drop pronouns before the first name; they have no antecedent
            let first = mentions.iter().position(|m| m.kind == MentionKind::ProperNoun).expect("checked");
            let chain: Vec<Mention> = mentions[first..].to_vec();
            if chain.len() >= 2 {
                vec![chain]
            } else {
                vec![]
            }
        } else {
            vec![]
        };
        SynthDocument {
            id,
            grade,
            text,
            trees,
            chains,
            has_tree_sidecar: b.rng.random_bool(config.tree_fraction.clamp(0.0, 1.0)),
            has_coref_sidecar: b.rng.random_bool(config.coref_fraction.clamp(0.0, 1.0)),
        }
    }

    /// Tables parsed into in-memory resources, with the starter patterns.
    pub fn resources(&self) -> Result<Resources> {
        Ok(Resources {
            gept: Some(GradedLexicon::parse("gept", &self.gept_tsv, LevelSchema::gept())?.lexicon),
            vq: Some(GradedLexicon::parse("vq", &self.vq_tsv, LevelSchema::vq())?.lexicon),
            bnc: Some(FrequencyTable::parse("bnc", &self.bnc_tsv)?),
            search_counts: Some(FrequencyTable::parse("search", &self.search_tsv)?),
            synsets: Some(SynsetTable::parse("synsets", &self.synsets_tsv)?),
            patterns: starter_patterns(),
            ..Resources::default()
        })
    }

    /// Tokenized documents with their sidecars attached, as `load_corpus`
    /// would produce from the written files.
    pub fn load_documents(&self, tokenizer: &TokenizerConfig) -> Result<Vec<Document>> {
        self.documents
            .iter()
            .map(|sd| {
                let mut doc = tokenize(&sd.id, &sd.text, tokenizer)?.with_grade(sd.grade);
                if sd.has_tree_sidecar {
                    doc.attach_trees(sd.trees.clone());
                }
                if sd.has_coref_sidecar {
                    let chains = parse_coref_sidecar(&serde_json::to_string(&sd.chains)?, &doc)?;
                    doc.attach_coref(chains);
                }
                Ok(doc)
            })
            .collect()
    }

    /// Writes documents, sidecars, resource tables and `manifest.json`
    /// under `dir`; returns the manifest path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let docs_dir = dir.join("docs");
        let res_dir = dir.join("resources");
        std::fs::create_dir_all(&docs_dir)?;
        std::fs::create_dir_all(&res_dir)?;
        let mut entries = Vec::with_capacity(self.documents.len());
        for sd in &self.documents {
            std::fs::write(docs_dir.join(format!("{}.txt", sd.id)), format!("{}\n", sd.text))?;
            let mut entry = serde_json::json!({
                "id": sd.id,
                "path": format!("docs/{}.txt", sd.id),
                "grade": sd.grade,
            });
            if sd.has_tree_sidecar {
                let trees: String = sd.trees.iter().map(|t| format!("{t}\n")).collect();
                std::fs::write(docs_dir.join(format!("{}.tree", sd.id)), trees)?;
                entry["tree"] = format!("docs/{}.tree", sd.id).into();
            }
            if sd.has_coref_sidecar {
                std::fs::write(docs_dir.join(format!("{}.coref.json", sd.id)), serde_json::to_string(&sd.chains)?)?;
                entry["coref"] = format!("docs/{}.coref.json", sd.id).into();
            }
            entries.push(entry);
        }
        for (name, body) in [
            ("gept.tsv", &self.gept_tsv),
            ("vq.tsv", &self.vq_tsv),
            ("bnc.tsv", &self.bnc_tsv),
            ("search_counts.tsv", &self.search_tsv),
            ("synsets.tsv", &self.synsets_tsv),
        ] {
            std::fs::write(res_dir.join(name), body)?;
        }
        let manifest = serde_json::json!({
            "documents": entries,
            "resources": {
                "gept": "resources/gept.tsv",
                "vq": "resources/vq.tsv",
                "bnc_frequency": "resources/bnc.tsv",
                "search_counts": "resources/search_counts.tsv",
                "synsets": "resources/synsets.tsv",
            }
        });
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(path)
    }
}

/// `n` rows of `features` independent standard-normal columns named
/// x1..xK, with y = Σ coef·x_j + N(0, sigma²) for the planted (j, coef)
/// pairs (1-based j).
pub fn planted_dataset(n: usize, features: usize, planted: &[(usize, f64)], sigma: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: Vec<Vec<f64>> = (0..features)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let signal: f64 = planted.iter().map(|&(j, c)| c * columns[j - 1][i]).sum();
            signal + sigma * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    Dataset::new(
        (0..n).map(|i| format!("r{i}")).collect(),
        (1..=features).map(|j| format!("x{j}")).collect(),
        columns,
        y,
    )
    .expect("consistent shapes")
}
