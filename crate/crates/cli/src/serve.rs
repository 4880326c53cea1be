use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::{Duration, SystemTime};

use anyhow::{Context, Result};
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use clap::Args;
use readgrade_core::model::{LevelThresholds, TrainingMeta};
use readgrade_core::service::{Scorer, ScoreRequest, ServiceError, TreeProvider};
use readgrade_core::RegressionModel;
use serde::Serialize;
use tower_http::cors::CorsLayer;

use crate::commands::build_scorer;
use crate::config::CommonArgs;
use crate::parser::SubprocessParser;

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    /// Model file written by `select`.
    #[arg(long, env = "READGRADE_MODEL")]
    pub model: PathBuf,
    #[arg(long, env = "READGRADE_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Manifest whose resources section supplies the lexical resources.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Shell command of a line-oriented constituency parser.
    #[arg(long, env = "READGRADE_PARSER")]
    pub parser_cmd: Option<String>,
    #[arg(long, default_value_t = readgrade_core::service::DEFAULT_MAX_CHARS)]
    pub max_chars: usize,
    /// Model-file polling interval for hot reload; 0 disables it.
    #[arg(long, default_value_t = 2000)]
    pub reload_ms: u64,
    /// Identifier clients may pass as `model_id`; defaults to the file stem.
    #[arg(long)]
    pub model_id: Option<String>,
}

/// The current scorer snapshot. Handlers clone the inner `Arc` and never
/// hold the lock while scoring; reloads replace it wholesale.
#[derive(Clone)]
pub struct AppState {
    scorer: Arc<RwLock<Arc<Scorer>>>,
}

impl AppState {
    pub fn new(scorer: Scorer) -> Self {
        AppState { scorer: Arc::new(RwLock::new(Arc::new(scorer))) }
    }

    pub fn current(&self) -> Arc<Scorer> {
        self.scorer.read().unwrap_or_else(|p| p.into_inner()).clone()
    }

    pub fn swap(&self, scorer: Scorer) {
        *self.scorer.write().unwrap_or_else(|p| p.into_inner()) = Arc::new(scorer);
    }
}

#[derive(Debug, Serialize)]
pub struct ModelInfo {
    pub model_id: String,
    pub registry_hash: String,
    pub subset: Vec<String>,
    pub intercept: f64,
    pub coefficients: BTreeMap<String, f64>,
    pub thresholds: Option<LevelThresholds>,
    pub training_meta: TrainingMeta,
    /// Whether tree-dependent features can be computed for raw text.
    pub tree_provider: bool,
    pub max_chars: usize,
}

impl ModelInfo {
    fn of(s: &Scorer) -> Self {
        let m: &RegressionModel = &s.model;
        ModelInfo {
            model_id: s.model_id.clone(),
            registry_hash: m.registry_hash.clone(),
            subset: m.subset.clone(),
            intercept: m.intercept,
            coefficients: m.coefficients.clone(),
            thresholds: m.thresholds.clone(),
            training_meta: m.training_meta.clone(),
            tree_provider: s.tree_provider.is_some(),
            max_chars: s.max_chars,
        }
    }
}

fn error_response(e: ServiceError) -> Response {
    let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let mut body = serde_json::to_value(&e).unwrap_or_default();
    body["message"] = e.to_string().into();
    (status, Json(body)).into_response()
}

async fn score(State(state): State<AppState>, Json(request): Json<ScoreRequest>) -> Response {
    let scorer = state.current();
    match tokio::task::spawn_blocking(move || scorer.handle_score(&request)).await {
        Ok(Ok(r)) => Json(r).into_response(),
        Ok(Err(e)) => error_response(e),
        Err(e) => error_response(ServiceError::Internal { message: e.to_string() }),
    }
}

async fn model(State(state): State<AppState>) -> Json<ModelInfo> {
    Json(ModelInfo::of(&state.current()))
}

async fn health(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok", "model_id": state.current().model_id }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/score", post(score))
        .route("/model", get(model))
        .route("/health", get(health))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

fn modified(path: &std::path::Path) -> Option<SystemTime> {
    std::fs::metadata(path).and_then(|m| m.modified()).ok()
}

pub fn run(args: &ServeArgs) -> Result<()> {
    let common = CommonArgs { manifest: args.manifest.clone(), config: args.config.clone(), ..CommonArgs::default() };
    let model_id = args
        .model_id
        .clone()
        .or_else(|| args.model.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "default".into());
    let provider: Option<Arc<dyn TreeProvider>> =
        args.parser_cmd.as_ref().map(|c| Arc::new(SubprocessParser::new(c.clone())) as Arc<dyn TreeProvider>);
    let max_chars = args.max_chars;
    let configure = move |mut s: Scorer| {
        s.max_chars = max_chars;
        if let Some(p) = &provider {
            s = s.with_tree_provider(p.clone());
        }
        s
    };
    let scorer = configure(build_scorer(&args.model, &model_id, &common)?);
    if scorer.tree_provider.is_none() && scorer.model.subset.iter().any(|f| is_tree_feature(f)) {
        eprintln!("warning: the model uses tree features but no parser is configured; /score will answer 422");
    }
    let state = AppState::new(scorer);

    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        if args.reload_ms > 0 {
            let state = state.clone();
            let path = args.model.clone();
            let interval = Duration::from_millis(args.reload_ms);
            let mut seen = modified(&path);
            let model_id = model_id.clone();
            let resources = state.current().resources.clone();
            let configure = configure.clone();
            tokio::spawn(async move {
                loop {
                    tokio::time::sleep(interval).await;
                    let now = modified(&path);
                    if now == seen {
                        continue;
                    }
                    seen = now;
                    let reloaded = RegressionModel::load(&path).and_then(|m| {
                        Scorer::new(model_id.clone(), m, resources.clone(), readgrade_core::FeatureRegistry::default())
                    });
                    match reloaded {
                        Ok(s) => {
                            state.swap(configure(s));
                            eprintln!("reloaded model from {}", path.display());
                        }
                        Err(e) => eprintln!("warning: keeping previous model, reload failed: {e}"),
                    }
                }
            });
        }
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr).await.with_context(|| format!("cannot bind {addr}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(state)).await?;
        Ok::<_, anyhow::Error>(())
    })
}

fn is_tree_feature(name: &str) -> bool {
    let registry = readgrade_core::FeatureRegistry::default();
    registry
        .index_of(name)
        .is_some_and(|i| registry.features()[i].requires == readgrade_core::features::Requirement::Trees)
}
