use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use readgrade_core::corpus::{CorpusManifest, ResourcePaths};
use readgrade_core::coref::CorefNormalization;
use readgrade_core::features::FeatureConfig;
use readgrade_core::syntax::GrammarNormalization;
use serde::{Deserialize, Serialize};

/// Flags shared by the pipeline subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Corpus manifest (JSON).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads for featurization.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub alpha_enter: Option<f64>,
    /// Use ln|D| / n for sentence_length.
    #[arg(long)]
    pub sentence_length_log: bool,
    /// per_sentence or per100_words.
    #[arg(long, value_parser = parse_enum::<GrammarNormalization>)]
    pub grammar_normalization: Option<GrammarNormalization>,
    /// per_sentence or raw.
    #[arg(long, value_parser = parse_enum::<CorefNormalization>)]
    pub coref_normalization: Option<CorefNormalization>,
}

fn parse_enum<T: for<'de> Deserialize<'de>>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

/// What a `--config` file may set. Relative paths resolve against the
/// file's directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub manifest: Option<PathBuf>,
    pub resources: Option<ResourcePaths>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub folds: Option<usize>,
    pub reps: Option<usize>,
    pub alpha_enter: Option<f64>,
    pub jobs: Option<usize>,
    pub features: Option<FeatureConfig>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut c: ConfigFile =
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for p in [&mut c.manifest, &mut c.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(r) = c.resources.as_mut() {
            r.resolve_against(base);
        }
        Ok(c)
    }
}

/// The effective configuration of one run, written to `run_config.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub manifest: Option<PathBuf>,
    pub resources: ResourcePaths,
    pub out: PathBuf,
    pub seed: u64,
    pub folds: usize,
    pub reps: usize,
    pub alpha_enter: f64,
    pub jobs: Option<usize>,
    pub features: FeatureConfig,
}

pub const DEFAULT_OUT: &str = "readgrade-out";

fn merge_resources(base: &mut ResourcePaths, over: ResourcePaths) {
    macro_rules! take {
        ($($f:ident),*) => { $( if over.$f.is_some() { base.$f = over.$f; } )* };
    }
    take!(gept, vq, bnc_frequency, search_counts, synsets, patterns, pronunciations, lemmas, stop_words, pronouns, abbreviations);
}

impl RunConfig {
    /// Flags over config file over defaults. Manifest resources are the
    /// base that config-file resources override field by field.
    pub fn resolve(command: &str, args: &CommonArgs) -> Result<(Self, Option<CorpusManifest>)> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let mut features = file.features.unwrap_or_default();
        if args.sentence_length_log {
            features.sentence_length_log = true;
        }
        if let Some(g) = args.grammar_normalization {
            features.grammar_normalization = g;
        }
        if let Some(c) = args.coref_normalization {
            features.coref_normalization = c;
        }
        let manifest_path = args.manifest.clone().or(file.manifest);
        let manifest = manifest_path
            .as_deref()
            .map(|p| CorpusManifest::load(p).with_context(|| format!("cannot load manifest {}", p.display())))
            .transpose()?;
        let mut resources = manifest.as_ref().map(|m| m.resources.clone()).unwrap_or_default();
        if let Some(r) = file.resources {
            merge_resources(&mut resources, r);
        }
        let config = RunConfig {
            command: command.to_string(),
            manifest: manifest_path,
            resources,
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            seed: args.seed.or(file.seed).unwrap_or(42),
            folds: args.folds.or(file.folds).unwrap_or(5),
            reps: args.reps.or(file.reps).unwrap_or(5),
            alpha_enter: args.alpha_enter.or(file.alpha_enter).unwrap_or(0.05),
            jobs: args.jobs.or(file.jobs),
            features,
        };
        config.validate()?;
        Ok((config, manifest))
    }

    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            bail!("--folds must be at least 2, got {}", self.folds);
        }
        if self.reps < 1 {
            bail!("--reps must be at least 1");
        }
        if !(self.alpha_enter > 0.0 && self.alpha_enter <= 1.0) {
            bail!("--alpha-enter must be in (0, 1], got {}", self.alpha_enter);
        }
        if self.jobs == Some(0) {
            bail!("--jobs must be at least 1");
        }
        Ok(())
    }

    pub fn write(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out).with_context(|| format!("cannot create {}", self.out.display()))?;
        std::fs::write(self.out.join("run_config.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
