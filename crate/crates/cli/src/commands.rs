use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use readgrade_core::corpus::{load_corpus, tokenize, CorpusManifest};
use readgrade_core::coref::load_coref_sidecar;
use readgrade_core::features::{export_table, featurize_all, provenance_report, read_table, FeatureVector};
use readgrade_core::model::{fit_dataset, fit_thresholds, forward_select, CvConfig, Dataset};
use readgrade_core::report::{evaluate, table3, table5, EvalConfig, EvaluationReport};
use readgrade_core::service::{Scorer, ScoreResponse, ServiceError};
use readgrade_core::synth::{SynthConfig, SynthCorpus};
use readgrade_core::syntax::parse_tree_file;
use readgrade_core::{Document, FeatureRegistry, RegressionModel, Resources};

use crate::config::{CommonArgs, RunConfig};

fn require_manifest(manifest: Option<CorpusManifest>) -> Result<CorpusManifest> {
    manifest.ok_or_else(|| anyhow::anyhow!("no corpus manifest; pass --manifest or set \"manifest\" in --config"))
}

pub fn load_resources(config: &RunConfig) -> Result<Resources> {
    let (resources, warnings) = Resources::load(&config.resources)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(resources)
}

/// Loads the corpus and featurizes it; writes the provenance report.
fn featurize_corpus(config: &RunConfig, manifest: &CorpusManifest) -> Result<(Vec<Document>, Resources, Vec<FeatureVector>)> {
    let resources = load_resources(config)?;
    let docs = load_corpus(manifest, &resources.tokenizer)?;
    let registry = FeatureRegistry::default();
    let vectors = featurize_all(&docs, &resources, &config.features, &registry)?;
    let report = provenance_report(&docs, &vectors, &registry);
    std::fs::create_dir_all(&config.out)?;
    std::fs::write(config.out.join("provenance.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    Ok((docs, resources, vectors))
}

pub fn featurize(args: &CommonArgs) -> Result<()> {
    let (config, manifest) = RunConfig::resolve("featurize", args)?;
    let manifest = require_manifest(manifest)?;
    config.write()?;
    let (_, _, vectors) = featurize_corpus(&config, &manifest)?;
    let path = config.out.join("features.csv");
    let (rows, cols) = export_table(&path, &vectors, &FeatureRegistry::default())?;
    eprintln!("wrote {} ({rows} rows, {cols} columns)", path.display());
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Feature table from `featurize`; the manifest is featurized when absent.
    #[arg(long)]
    pub features: Option<PathBuf>,
}

/// Fits the chosen subset on all complete rows and attaches in-sample
/// level thresholds.
pub fn train_model(data: &Dataset, subset: &[String], registry: &FeatureRegistry) -> Result<RegressionModel> {
    let mut model = fit_dataset(data, subset, &registry.hash())?;
    let cols = data.columns_for(subset)?;
    let scored: Vec<(i64, f64)> = (0..data.n())
        .map(|i| {
            let s = model.intercept + subset.iter().zip(&cols).map(|(n, c)| model.coefficient(n) * c[i]).sum::<f64>();
            (data.y[i] as i64, s)
        })
        .collect();
    let levels: Vec<i64> = scored.iter().map(|s| s.0).collect::<BTreeSet<_>>().into_iter().collect();
    model.thresholds = Some(fit_thresholds(&scored, &levels)?);
    Ok(model)
}

pub fn select(args: &SelectArgs) -> Result<()> {
    let (config, manifest) = RunConfig::resolve("select", &args.common)?;
    config.write()?;
    let registry = FeatureRegistry::default();
    let vectors = match &args.features {
        Some(p) => read_table(p, &registry).with_context(|| format!("cannot read feature table {}", p.display()))?,
        None => featurize_corpus(&config, &require_manifest(manifest)?)?.2,
    };
    let (data, exclusions) = Dataset::from_vectors(&vectors, &registry, None)?;
    let mut trace = forward_select(&data, None, config.alpha_enter)?;
    trace.excluded_rows = exclusions.rows;
    trace.dropped_features = exclusions.features;
    let Some(subset) = trace.chosen_subset().map(<[String]>::to_vec) else {
        bail!("forward selection accepted no feature");
    };
    let mut model = train_model(&data, &subset, &registry)?;
    model.training_meta.feature_config = config.features;
    model.selection_trace = Some(trace.clone());

    let table = table3(&trace);
    std::fs::write(config.out.join("selection.csv"), table.to_csv()?)?;
    std::fs::write(config.out.join("selection.md"), table.rounded().to_markdown())?;
    model.save(&config.out.join("model.json"))?;
    print!("{}", table.rounded().to_markdown());
    eprintln!("chosen subset: {}", subset.join(", "));
    Ok(())
}

fn run_evaluation(command: &str, args: &CommonArgs) -> Result<(RunConfig, EvaluationReport)> {
    let (config, manifest) = RunConfig::resolve(command, args)?;
    let manifest = require_manifest(manifest)?;
    config.write()?;
    let (docs, resources, vectors) = featurize_corpus(&config, &manifest)?;
    let eval = EvalConfig {
        cv: CvConfig { folds: config.folds, reps: config.reps, seed: config.seed, levels: None },
        alpha_enter: config.alpha_enter,
    };
    let report = evaluate(&vectors, &docs, &FeatureRegistry::default(), resources.pronunciations.as_ref(), &eval)?;
    Ok((config, report))
}

pub fn evaluate_cmd(args: &CommonArgs) -> Result<()> {
    let (config, report) = run_evaluation("evaluate", args)?;
    report.write(&config.out)?;
    print!("{}", report.to_markdown());
    Ok(())
}

pub fn compare(args: &CommonArgs) -> Result<()> {
    let (config, report) = run_evaluation("compare", args)?;
    let table = table5(&report.estimators);
    std::fs::write(config.out.join(format!("{}.csv", table.name)), table.to_csv()?)?;
    std::fs::write(config.out.join(format!("{}.md", table.name)), table.rounded().to_markdown())?;
    print!("{}", table.rounded().to_markdown());
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// Model file written by `select`.
    #[arg(long)]
    pub model: PathBuf,
    /// Plain-text document to score.
    pub document: PathBuf,
    /// Manifest whose resources section supplies the lexical resources.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// One bracketed tree per sentence.
    #[arg(long)]
    pub trees: Option<PathBuf>,
    /// Coreference sidecar (JSON).
    #[arg(long)]
    pub coref: Option<PathBuf>,
    /// Print the response as JSON.
    #[arg(long)]
    pub json: bool,
}

pub fn build_scorer(model_path: &Path, model_id: &str, common: &CommonArgs) -> Result<Scorer> {
    let (config, _) = RunConfig::resolve("score", common)?;
    let model = RegressionModel::load(model_path).with_context(|| format!("cannot load model {}", model_path.display()))?;
    let resources = load_resources(&config)?;
    Ok(Scorer::new(model_id, model, resources, FeatureRegistry::default())?)
}

pub fn score_document(args: &ScoreArgs) -> Result<ScoreResponse> {
    let common = CommonArgs { manifest: args.manifest.clone(), config: args.config.clone(), ..CommonArgs::default() };
    let scorer = build_scorer(&args.model, "default", &common)?;
    let text = std::fs::read_to_string(&args.document).with_context(|| format!("cannot read {}", args.document.display()))?;
    let id = args.document.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut doc = tokenize(&id, &text, &scorer.resources.tokenizer).map_err(|e| readgrade_core::Error::in_document(&id, e))?;
    if let Some(p) = &args.trees {
        doc.attach_trees(parse_tree_file(p).map_err(|e| readgrade_core::Error::in_document(&id, e))?);
    }
    if let Some(p) = &args.coref {
        let chains = load_coref_sidecar(p, &doc).map_err(|e| readgrade_core::Error::in_document(&id, e))?;
        doc.attach_coref(chains);
    }
    scorer.score_document(doc).map_err(|e: ServiceError| anyhow::anyhow!(e))
}

pub fn score(args: &ScoreArgs) -> Result<()> {
    let r = score_document(args)?;
    let mut out = std::io::stdout().lock();
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
        return Ok(());
    }
    writeln!(out, "score\t{}", r.score)?;
    writeln!(out, "level\t{}", r.level.map_or_else(|| "-".to_string(), |l| l.to_string()))?;
    writeln!(out, "intercept\t{}", r.intercept)?;
    writeln!(out, "feature\tvalue\tcoefficient\tcontribution")?;
    for f in &r.features {
        writeln!(out, "{}\t{}\t{}\t{}", f.name, f.value, f.coefficient, f.contribution)?;
    }
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Directory to write the corpus and manifest into.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 40)]
    pub docs_per_grade: usize,
    /// Comma-separated grade labels.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5, 6])]
    pub grades: Vec<i64>,
    #[arg(long, default_value_t = 1.0)]
    pub tree_fraction: f64,
    #[arg(long, default_value_t = 1.0)]
    pub coref_fraction: f64,
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    if args.grades.len() < 2 {
        bail!("need at least two grades");
    }
    let corpus = SynthCorpus::generate(&SynthConfig {
        grades: args.grades.clone(),
        docs_per_grade: args.docs_per_grade,
        seed: args.seed,
        tree_fraction: args.tree_fraction,
        coref_fraction: args.coref_fraction,
    });
    let path = corpus.write(&args.out)?;
    println!("{}", path.display());
    Ok(())
}
