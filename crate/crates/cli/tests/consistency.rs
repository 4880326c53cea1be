//! The CLI `score` path and the HTTP `/score` endpoint must report the same
//! grade for the same text, model and resources.

use std::path::Path;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use readgrade_cli::commands::{build_scorer, score_document, ScoreArgs};
use readgrade_cli::config::CommonArgs;
use readgrade_cli::serve::{router, AppState};
use readgrade_core::features::{featurize_all, FeatureConfig};
use readgrade_core::model::{fit_thresholds, fit_ols, predict};
use readgrade_core::synth::{SynthConfig, SynthCorpus};
use readgrade_core::FeatureRegistry;
use tower::ServiceExt;

const TEXTS: [&str; 3] = [
    "Tom has a red ball. He likes it.",
    "Mia walked to the old market with her brother. She bought bread, milk and a small cake. Then they went home before the rain.",
    "The committee postponed the decision because the evidence, which several members considered incomplete, \
     had arrived late. Nevertheless, the chairwoman insisted that a provisional recommendation be drafted.",
];

fn train(dir: &Path) -> std::path::PathBuf {
    let corpus = SynthCorpus::generate(&SynthConfig { docs_per_grade: 10, ..SynthConfig::default() });
    let manifest = corpus.write(&dir.join("corpus")).unwrap();
    let res = corpus.resources().unwrap();
    let docs = corpus.load_documents(&res.tokenizer).unwrap();
    let reg = FeatureRegistry::default();
    let vectors = featurize_all(&docs, &res, &FeatureConfig::default(), &reg).unwrap();
    let subset: Vec<String> = ["word_number", "sentence_length", "syllables", "gept1", "bnc_frequency", "pronoun"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut model = fit_ols(&vectors, &reg, &subset).unwrap();
    let scored: Vec<(i64, f64)> = vectors.iter().map(|v| (v.grade.unwrap(), predict(&model, v, &reg).unwrap())).collect();
    model.thresholds = Some(fit_thresholds(&scored, &[1, 2, 3, 4, 5, 6]).unwrap());
    model.save(&dir.join("model.json")).unwrap();
    manifest
}

#[tokio::test]
async fn cli_and_service_agree_on_fixture_texts() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = train(dir.path());
    let model = dir.path().join("model.json");
    let common = CommonArgs { manifest: Some(manifest.clone()), ..CommonArgs::default() };
    let state = AppState::new(build_scorer(&model, "default", &common).unwrap());

    for (i, text) in TEXTS.iter().enumerate() {
        let path = dir.path().join(format!("text{i}.txt"));
        std::fs::write(&path, text).unwrap();
        let cli = score_document(&ScoreArgs {
            model: model.clone(),
            document: path,
            manifest: Some(manifest.clone()),
            config: None,
            trees: None,
            coref: None,
            json: true,
        })
        .unwrap();

        let req = Request::builder()
            .method("POST")
            .uri("/score")
            .header("content-type", "application/json")
            .body(Body::from(serde_json::json!({ "text": text }).to_string()))
            .unwrap();
        let resp = router(state.clone()).oneshot(req).await.unwrap();
        assert_eq!(resp.status(), StatusCode::OK);
        let body: serde_json::Value = serde_json::from_slice(&to_bytes(resp.into_body(), usize::MAX).await.unwrap()).unwrap();

        assert_eq!(body["level"].as_i64(), cli.level, "text {i}");
        assert_eq!(body["score"].as_f64().unwrap().to_bits(), cli.score.to_bits(), "text {i}");
        for (f, c) in body["features"].as_array().unwrap().iter().zip(&cli.features) {
            assert_eq!(f["name"], c.name.as_str());
            assert_eq!(f["value"].as_f64().unwrap().to_bits(), c.value.to_bits());
        }
    }
}
