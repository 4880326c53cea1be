//! Request/response scoring behind `POST /score`, independent of any HTTP
//! framework. Errors carry the status code the server should answer with.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Annotation, Document};
use crate::features::{featurize, FeatureConfig, FeatureRegistry, Resources};
use crate::model::RegressionModel;
use crate::syntax::ParseTree;
use crate::{Error, Result};

pub const DEFAULT_MAX_CHARS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub text: String,
    #[serde(default, alias = "modelId")]
    pub model_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureContribution {
    pub name: String,
    pub value: f64,
    pub coefficient: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub model_id: String,
    pub score: f64,
    pub intercept: f64,
    pub level: Option<i64>,
    pub features: Vec<FeatureContribution>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum ServiceError {
    TooLarge { limit: usize, actual: usize },
    Unprocessable { message: String, missing_features: Vec<String> },
    UnknownModel { model_id: String },
    Internal { message: String },
}

impl ServiceError {
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::TooLarge { .. } => 413,
            ServiceError::Unprocessable { .. } => 422,
            ServiceError::UnknownModel { .. } => 404,
            ServiceError::Internal { .. } => 500,
        }
    }
}

impl std::fmt::Display for ServiceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ServiceError::TooLarge { limit, actual } => write!(f, "text has {actual} characters; the limit is {limit}"),
            ServiceError::Unprocessable { message, .. } => f.write_str(message),
            ServiceError::UnknownModel { model_id } => write!(f, "unknown model '{model_id}'"),
            ServiceError::Internal { message } => f.write_str(message),
        }
    }
}

impl std::error::Error for ServiceError {}

/// Produces one constituency tree per sentence for submitted text.
pub trait TreeProvider: Send + Sync {
    fn parse(&self, sentences: &[Vec<String>]) -> Result<Vec<ParseTree>>;
}

/// A loaded model plus everything needed to featurize raw text.
pub struct Scorer {
    pub model_id: String,
    pub model: RegressionModel,
    pub resources: Resources,
    pub registry: FeatureRegistry,
    pub config: FeatureConfig,
    pub max_chars: usize,
    pub tree_provider: Option<Arc<dyn TreeProvider>>,
}

impl std::fmt::Debug for Scorer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scorer")
            .field("model_id", &self.model_id)
            .field("subset", &self.model.subset)
            .field("max_chars", &self.max_chars)
            .field("tree_provider", &self.tree_provider.is_some())
            .finish()
    }
}

impl Scorer {
    /// Uses the feature configuration recorded at training time. Fails when
    /// the model was trained against a different registry.
    pub fn new(model_id: impl Into<String>, model: RegressionModel, resources: Resources, registry: FeatureRegistry) -> Result<Self> {
        model.check_registry(&registry)?;
        let config = model.training_meta.feature_config;
        Ok(Scorer {
            model_id: model_id.into(),
            model,
            resources,
            registry,
            config,
            max_chars: DEFAULT_MAX_CHARS,
            tree_provider: None,
        })
    }

    pub fn with_tree_provider(mut self, provider: Arc<dyn TreeProvider>) -> Self {
        self.tree_provider = Some(provider);
        self
    }

    pub fn handle_score(&self, request: &ScoreRequest) -> std::result::Result<ScoreResponse, ServiceError> {
        if let Some(id) = &request.model_id {
            if *id != self.model_id {
                return Err(ServiceError::UnknownModel { model_id: id.clone() });
            }
        }
        let chars = request.text.chars().count();
        if chars > self.max_chars {
            return Err(ServiceError::TooLarge { limit: self.max_chars, actual: chars });
        }
        let doc = tokenize("request", &request.text, &self.resources.tokenizer).map_err(|e| match e {
            Error::EmptyDocument => ServiceError::Unprocessable {
                message: "text contains no words".into(),
                missing_features: Vec::new(),
            },
            other => ServiceError::Internal { message: other.to_string() },
        })?;
        self.score_document(doc)
    }

    /// Scores an already tokenized document. The tree provider runs only
    /// when the document has no trees of its own.
    pub fn score_document(&self, mut doc: Document) -> std::result::Result<ScoreResponse, ServiceError> {
        let mut warnings = Vec::new();
        if let (Some(provider), false) = (&self.tree_provider, doc.has(Annotation::Trees)) {
            let sentences: Vec<Vec<String>> = doc
                .sentences
                .iter()
                .map(|s| s.tokens.iter().map(|t| t.surface.clone()).collect())
                .collect();
            match provider.parse(&sentences) {
                Ok(trees) if trees.len() == sentences.len() => doc.attach_trees(trees),
                Ok(trees) => warnings.push(format!(
                    "parser returned {} trees for {} sentences; tree features unavailable",
                    trees.len(),
                    sentences.len()
                )),
                Err(e) => warnings.push(format!("parser failed ({e}); tree features unavailable")),
            }
        }

        let vector = featurize(&doc, &self.resources, &self.config, &self.registry)
            .map_err(|e| ServiceError::Internal { message: e.to_string() })?;
        if vector.provenance.heuristic_coref {
            warnings.push("coreference estimated by string matching".into());
        }
        if vector.provenance.flat_trees {
            warnings.push("parsing features computed from flat fallback trees".into());
        }
        let contributions = self.model.contributions(&vector, &self.registry).map_err(|e| match e {
            Error::MissingFeature { features } => ServiceError::Unprocessable {
                message: format!(
                    "model needs features that cannot be computed: {}{}",
                    features.join(", "),
                    remediation(&features, &self.registry)
                ),
                missing_features: features,
            },
            other => ServiceError::Internal { message: other.to_string() },
        })?;
        let score = self.model.intercept + contributions.iter().map(|c| c.contribution).sum::<f64>();
        Ok(ScoreResponse {
            model_id: self.model_id.clone(),
            score,
            intercept: self.model.intercept,
            level: self.model.classify(score),
            features: contributions
                .into_iter()
                .map(|c| FeatureContribution {
                    name: c.name,
                    value: c.value,
                    coefficient: c.coefficient,
                    contribution: c.contribution,
                })
                .collect(),
            warnings,
        })
    }
}

fn remediation(features: &[String], registry: &FeatureRegistry) -> String {
    use crate::features::Requirement;
    let mut hints: Vec<&str> = features
        .iter()
        .filter_map(|f| registry.index_of(f).map(|i| registry.features()[i].requires))
        .map(|r| match r {
            Requirement::Trees => "supply one bracketed parse tree per sentence or configure a parser",
            Requirement::GeptList => "provide the gept word list",
            Requirement::VqList => "provide the vq word list",
            Requirement::CorpusFrequency => "provide the corpus frequency table",
            Requirement::SearchCounts => "provide the search count table",
            Requirement::Synsets => "provide the synset count table",
            Requirement::None => "check the input text",
        })
        .collect();
    hints.dedup();
    if hints.is_empty() {
        String::new()
    } else {
        format!(" ({})", hints.join("; "))
    }
}
