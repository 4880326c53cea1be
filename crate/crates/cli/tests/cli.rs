use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use readgrade_core::features::{featurize, read_table, write_table_to, FeatureConfig, FeatureVector, Provenance};
use readgrade_core::model::{predict, CvConfig};
use readgrade_core::report::{evaluate, EvalConfig};
use readgrade_core::synth::planted_dataset;
use readgrade_core::{FeatureRegistry, RegressionModel};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_readgrade"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generated(dir: &Path, per_grade: &str) -> PathBuf {
    let corpus = dir.join("corpus");
    ok(&["generate", "--out", p(&corpus), "--docs-per-grade", per_grade]);
    corpus.join("manifest.json")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn three_doc_manifest(dir: &Path, bad_tree: bool) -> PathBuf {
    write(dir, "a.txt", "Tom ran home. He was tired.");
    write(dir, "b.txt", "The cat sat on the mat.");
    write(dir, "c.txt", "Birds sing loudly in the morning because they are happy.");
    write(dir, "a.tree", "(S (NP (NNP Tom)) (VP (VBD ran) (NP (NN home))))\n(S (NP (PRP He)) (VP (VBD was) (ADJP (JJ tired))))\n");
    write(
        dir,
        "b.tree",
        if bad_tree { "(S (NP (DT The) (NN cat)) (VP (VBD sat)\n" } else { "(S (NP (DT The) (NN cat)) (VP (VBD sat) (PP (IN on) (NP (DT the) (NN mat)))))\n" },
    );
    write(
        dir,
        "m.json",
        r#"{"documents": [
            {"id": "a", "path": "a.txt", "grade": 1, "tree": "a.tree"},
            {"id": "b", "path": "b.txt", "grade": 2, "tree": "b.tree"},
            {"id": "c", "path": "c.txt", "grade": 3}
        ]}"#,
    )
}

#[test]
fn featurize_three_docs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = three_doc_manifest(dir.path(), false);
    let out = dir.path().join("out");
    ok(&["featurize", "--manifest", p(&manifest), "--out", p(&out)]);
    let rows = read_table(&out.join("features.csv"), &FeatureRegistry::default()).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r.doc_id.as_str()).collect::<Vec<_>>(), ["a", "b", "c"]);
    let reg = FeatureRegistry::default();
    assert_eq!(rows[0].get(&reg, "tree_height"), Some(4.0));
    assert_eq!(rows[1].get(&reg, "pp"), Some(1.0));
    assert_eq!(rows[2].get(&reg, "tree_height"), None);
    let prov: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["documents"], 3);
    assert!((prov["missing_trees_fraction"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!(out.join("run_config.json").exists());
}

#[test]
fn bad_tree_names_document() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = three_doc_manifest(dir.path(), true);
    let out = run(&["featurize", "--manifest", p(&manifest), "--out", p(&dir.path().join("out"))]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("document b"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn featurize_and_select_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generated(dir.path(), "8");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&["featurize", "--manifest", p(&manifest), "--out", p(out)]);
        ok(&["select", "--manifest", p(&manifest), "--out", p(&out.join("sel"))]);
    }
    for f in ["features.csv", "provenance.json", "sel/selection.csv", "sel/model.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn select_recovers_planted_feature_and_reports_all_row() {
    let reg = FeatureRegistry::default();
    let n = 90;
    let noise = planted_dataset(n, reg.len(), &[], 1.0, 11);
    let target = reg.index_of("sentence_length").unwrap();
    let vectors: Vec<FeatureVector> = (0..n)
        .map(|i| {
            let grade = (i % 6) as i64 + 1;
            let mut values: Vec<f64> = noise.columns.iter().map(|c| c[i]).collect();
            values[target] = grade as f64 + 0.3 * values[target];
            FeatureVector {
                doc_id: format!("d{i}"),
                values,
                missing: vec![false; reg.len()],
                grade: Some(grade),
                provenance: Provenance::default(),
            }
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("features.csv");
    write_table_to(std::fs::File::create(&table).unwrap(), &vectors, &reg).unwrap();
    let out = dir.path().join("sel");
    let stdout = ok(&["select", "--features", p(&table), "--out", p(&out)]).stdout;
    assert!(String::from_utf8_lossy(&stdout).contains("| 1 | sentence_length |"));
    let csv = std::fs::read_to_string(out.join("selection.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert!(rows[1].starts_with("1,sentence_length,"));
    assert!(rows.last().unwrap().starts_with(",all,"));
    let model = RegressionModel::load(&out.join("model.json")).unwrap();
    assert_eq!(model.subset[0], "sentence_length");
    assert!(model.selection_trace.is_some());
}

#[test]
fn five_rows_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut docs = Vec::new();
    for i in 0..5 {
        write(dir.path(), &format!("d{i}.txt"), &"The dog runs fast. ".repeat(i + 1));
        docs.push(format!(r#"{{"path": "d{i}.txt", "grade": {}}}"#, i + 1));
    }
    let manifest = write(dir.path(), "m.json", &format!(r#"{{"documents": [{}]}}"#, docs.join(",")));
    let out = run(&["select", "--manifest", p(&manifest), "--out", p(&dir.path().join("out"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
}

#[test]
fn evaluate_writes_all_table_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generated(dir.path(), "10");
    let out = dir.path().join("eval");
    ok(&["evaluate", "--manifest", p(&manifest), "--out", p(&out), "--reps", "2"]);
    let read = |f: &str| std::fs::read_to_string(out.join(f)).unwrap();

    let t1 = read("table1_categories.csv");
    let baseline = t1.lines().find(|l| l.contains(",baseline-only,")).unwrap();
    let cells: Vec<f64> = baseline.split(',').skip(2).map(|c| c.parse().unwrap()).collect();
    assert!(cells.iter().all(|v| v.is_finite()));

    let t2 = read("table2_features.csv");
    assert_eq!(t2.lines().count(), 1 + 47);
    let t3 = read("table3_selection.csv");
    assert!(t3.lines().last().unwrap().starts_with(",all,"));
    let t5 = read("table5_estimators.csv");
    assert!(t5.lines().count() > 4);
    for label in ["Flesch Reading Ease", "Flesch-Kincaid Grade Level", "Coleman-Liau", "Proposed"] {
        assert!(t5.contains(label), "{label}");
    }
    let run_config: serde_json::Value = serde_json::from_str(&read("run_config.json")).unwrap();
    assert_eq!(run_config["reps"], 2);
    assert_eq!(run_config["folds"], 5);

    // the written report equals a library-level recomputation
    let reg = FeatureRegistry::default();
    let m = readgrade_core::corpus::CorpusManifest::load(&manifest).unwrap();
    let (res, _) = readgrade_core::Resources::load(&m.resources).unwrap();
    let docs = readgrade_core::corpus::load_corpus(&m, &res.tokenizer).unwrap();
    let vectors = readgrade_core::features::featurize_all(&docs, &res, &FeatureConfig::default(), &reg).unwrap();
    let config = EvalConfig { cv: CvConfig { reps: 2, ..CvConfig::default() }, alpha_enter: 0.05 };
    let lib = evaluate(&vectors, &docs, &reg, None, &config).unwrap();
    let written: serde_json::Value = serde_json::from_str(&read("report.json")).unwrap();
    assert_eq!(written, serde_json::to_value(&lib).unwrap());
    let t5_rmse: f64 = t5.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(t5_rmse, lib.estimators[0].rmse);
    assert!(lib.exclusions.rows.is_empty());
    for fold in &lib.proposed_cv.folds {
        let gold: Vec<f64> = fold.test.iter().map(|&i| vectors[i].grade.unwrap() as f64).collect();
        assert_eq!(readgrade_core::model::rmse(&gold, &fold.predictions).unwrap(), fold.rmse);
    }
    let mean = lib.proposed_cv.folds.iter().map(|f| f.rmse).sum::<f64>() / lib.proposed_cv.folds.len() as f64;
    assert!((mean - lib.proposed_cv.mean_rmse).abs() < 1e-12);
}

#[test]
fn config_file_precedence_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generated(dir.path(), "6");
    let config = write(
        dir.path(),
        "run.json",
        &format!(r#"{{"manifest": {:?}, "seed": 3, "folds": 4, "features": {{"sentence_length_log": true}}}}"#, p(&manifest)),
    );
    let out = dir.path().join("o");
    ok(&["featurize", "--config", p(&config), "--folds", "3", "--out", p(&out)]);
    let echoed: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("run_config.json")).unwrap()).unwrap();
    assert_eq!(echoed["seed"], 3);
    assert_eq!(echoed["folds"], 3);
    assert_eq!(echoed["reps"], 5);
    assert_eq!(echoed["features"]["sentence_length_log"], true);
    assert_eq!(echoed["command"], "featurize");
}

#[test]
fn score_matches_library_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generated(dir.path(), "10");
    let sel = dir.path().join("sel");
    ok(&["select", "--manifest", p(&manifest), "--out", p(&sel)]);
    let model_path = sel.join("model.json");
    let model = RegressionModel::load(&model_path).unwrap();
    let docs = dir.path().join("corpus/docs");
    let args = |extra: &[&str]| {
        let mut a = vec!["score", "--model", p(&model_path), "--manifest", p(&manifest)];
        a.extend_from_slice(extra);
        a.iter().map(|s| s.to_string()).collect::<Vec<_>>()
    };
    let doc = docs.join("g3_002.txt");
    let tree = docs.join("g3_002.tree");
    let coref = docs.join("g3_002.coref.json");
    let a = args(&["--trees", p(&tree), "--coref", p(&coref), "--json", p(&doc)]);
    let out = ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    // library path over the same document
    let reg = FeatureRegistry::default();
    let m = readgrade_core::corpus::CorpusManifest::load(&manifest).unwrap();
    let (res, _) = readgrade_core::Resources::load(&m.resources).unwrap();
    let corpus = readgrade_core::corpus::load_corpus(&m, &res.tokenizer).unwrap();
    let d = corpus.iter().find(|d| d.id == "g3_002").unwrap();
    let v = featurize(d, &res, &FeatureConfig::default(), &reg).unwrap();
    let expected = predict(&model, &v, &reg).unwrap();
    assert_eq!(r["score"].as_f64().unwrap(), expected);

    let sum: f64 = r["features"].as_array().unwrap().iter().map(|f| f["contribution"].as_f64().unwrap()).sum();
    assert!((r["score"].as_f64().unwrap() - r["intercept"].as_f64().unwrap() - sum).abs() < 1e-9);
    assert_eq!(r["features"].as_array().unwrap().len(), model.subset.len());

    let a = args(&["--trees", p(&tree), p(&doc)]);
    let text = String::from_utf8(ok(&a.iter().map(String::as_str).collect::<Vec<_>>()).stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("score\t"));
}

#[test]
fn score_without_trees_names_missing_feature() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generated(dir.path(), "4");
    let reg = FeatureRegistry::default();
    let m = readgrade_core::corpus::CorpusManifest::load(&manifest).unwrap();
    let (res, _) = readgrade_core::Resources::load(&m.resources).unwrap();
    let corpus = readgrade_core::corpus::load_corpus(&m, &res.tokenizer).unwrap();
    let vectors: Vec<_> = corpus.iter().map(|d| featurize(d, &res, &FeatureConfig::default(), &reg).unwrap()).collect();
    let model = readgrade_core::model::fit_ols(&vectors, &reg, &["word_number".into(), "tree_height".into()]).unwrap();
    let model_path = dir.path().join("model.json");
    model.save(&model_path).unwrap();
    let doc = dir.path().join("corpus/docs/g2_000.txt");
    let out = run(&["score", "--model", p(&model_path), "--manifest", p(&manifest), p(&doc)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("tree_height") && err.contains("parse tree"), "{err}");
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(&["generate", "--out", p(&a), "--docs-per-grade", "3", "--seed", "5"]);
    ok(&["generate", "--out", p(&b), "--docs-per-grade", "3", "--seed", "5"]);
    for f in ["manifest.json", "docs/g4_001.txt", "docs/g4_001.tree", "resources/vq.tsv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}
