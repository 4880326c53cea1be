//! Linear regression over feature vectors: fitting, metrics, forward
//! selection with BIC, cross-validation and level thresholds.

mod classic;
mod cv;
mod dataset;
pub mod linalg;
mod metrics;
pub(crate) mod nonfinite;
mod selection;
pub mod special;
mod thresholds;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureConfig, FeatureRegistry, FeatureVector, HEIGHT_CONVENTION, LOG_BASE};
use crate::{Error, Result};

pub use classic::{classic_formulas, letter_count, syllable_total, ClassicScores, CLASSIC_NAMES};
pub use cv::{cross_validate, fold_partition, CvConfig, CvReport, FoldResult, Pipeline, RepSummary};
pub use dataset::{Dataset, Exclusions};
pub use linalg::{least_squares, LeastSquares, COLLINEARITY_TOL};
pub use metrics::{accuracy, concordant_pairs, pearson, r_squared_of, rmse, tad};
pub use selection::{
    bic, bic_or_sentinel, forward_select, increment_f_test, select_by_bic, semi_partial_r, FTest, LinearFit,
    SelectionStep, SelectionTrace, SkippedCandidate,
};
pub use special::f_sf;
pub use thresholds::{classify, fit_thresholds, LevelThresholds};

/// How the BIC parameter count k was taken.
pub const BIC_PARAMETER_CONVENTION: &str = "slopes-only";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrainingMeta {
    pub log_base: String,
    pub height_convention: String,
    pub bic_parameter_convention: String,
    pub n: usize,
    pub rss: f64,
    pub r_squared: f64,
    #[serde(default)]
    pub feature_config: FeatureConfig,
}

/// Y = intercept + Σ coefficient · feature, over a named feature subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegressionModel {
    pub registry_hash: String,
    pub subset: Vec<String>,
    pub intercept: f64,
    pub coefficients: BTreeMap<String, f64>,
    #[serde(default)]
    pub thresholds: Option<LevelThresholds>,
    pub training_meta: TrainingMeta,
    #[serde(default)]
    pub selection_trace: Option<SelectionTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub name: String,
    pub value: f64,
    pub coefficient: f64,
    pub contribution: f64,
}

impl RegressionModel {
    /// Wraps a least-squares fit of `subset` on a dataset.
    pub fn from_fit(registry_hash: &str, subset: &[String], fit: &LeastSquares) -> Self {
        RegressionModel {
            registry_hash: registry_hash.to_string(),
            subset: subset.to_vec(),
            intercept: fit.intercept,
            coefficients: subset.iter().cloned().zip(fit.beta.iter().copied()).collect(),
            thresholds: None,
            training_meta: TrainingMeta {
                log_base: LOG_BASE.into(),
                height_convention: HEIGHT_CONVENTION.into(),
                bic_parameter_convention: BIC_PARAMETER_CONVENTION.into(),
                n: fit.n(),
                rss: fit.rss,
                r_squared: fit.r_squared(),
                feature_config: FeatureConfig::default(),
            },
            selection_trace: None,
        }
    }

    pub fn coefficient(&self, name: &str) -> f64 {
        self.coefficients.get(name).copied().unwrap_or(0.0)
    }

    /// α + Σ β·x for values looked up by name.
    pub fn predict_with(&self, value: impl Fn(&str) -> Option<f64>) -> Result<f64> {
        let mut missing = Vec::new();
        let mut score = self.intercept;
        for name in &self.subset {
            match value(name) {
                Some(v) => score += self.coefficient(name) * v,
                None => missing.push(name.clone()),
            }
        }
        if missing.is_empty() {
            Ok(score)
        } else {
            Err(Error::MissingFeature { features: missing })
        }
    }

    /// Per-feature value × coefficient, in subset order.
    pub fn contributions(&self, vector: &FeatureVector, registry: &FeatureRegistry) -> Result<Vec<Contribution>> {
        self.check_registry(registry)?;
        let missing: Vec<String> =
            self.subset.iter().filter(|n| vector.get(registry, n).is_none()).cloned().collect();
        if !missing.is_empty() {
            return Err(Error::MissingFeature { features: missing });
        }
        Ok(self
            .subset
            .iter()
            .map(|name| {
                let value = vector.get(registry, name).expect("checked");
                let coefficient = self.coefficient(name);
                Contribution {
                    name: name.clone(),
                    value,
                    coefficient,
                    contribution: value * coefficient,
                }
            })
            .collect())
    }

    pub fn check_registry(&self, registry: &FeatureRegistry) -> Result<()> {
        let actual = registry.hash();
        if actual != self.registry_hash {
            return Err(Error::RegistryMismatch {
                expected: self.registry_hash.clone(),
                actual,
            });
        }
        Ok(())
    }

    pub fn classify(&self, score: f64) -> Option<i64> {
        self.thresholds.as_ref().map(|t| classify(score, t))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::load(path, e))?;
        Self::from_json(&text)
    }
}

/// Fits `subset` by ordinary least squares on the rows where every subset
/// feature is present and a grade is known.
pub fn fit_ols(rows: &[FeatureVector], registry: &FeatureRegistry, subset: &[String]) -> Result<RegressionModel> {
    let mut data_rows = Vec::new();
    for r in rows {
        if r.grade.is_none() {
            continue;
        }
        let complete = subset
            .iter()
            .map(|n| registry.index_of(n).ok_or_else(|| Error::Config(format!("unknown feature '{n}'"))))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|&i| !r.missing[i]);
        if complete {
            data_rows.push(r.clone());
        }
    }
    let (data, _) = Dataset::from_vectors(&data_rows, registry, Some(subset))?;
    fit_dataset(&data, subset, &registry.hash())
}

/// Fits `subset` on a dataset; collinear columns are a [`Error::SingularDesign`].
pub fn fit_dataset(data: &Dataset, subset: &[String], registry_hash: &str) -> Result<RegressionModel> {
    if data.n() < subset.len() + 2 {
        return Err(Error::Config(format!(
            "{} complete rows cannot fit {} features (need at least {})",
            data.n(),
            subset.len(),
            subset.len() + 2
        )));
    }
    let cols = data.columns_for(subset)?;
    let fit = least_squares(&cols, &data.y);
    if !fit.dropped.is_empty() {
        return Err(Error::SingularDesign {
            features: fit.dropped.iter().map(|&j| subset[j].clone()).collect(),
        });
    }
    Ok(RegressionModel::from_fit(registry_hash, subset, &fit))
}

/// α + Σ β·x. The vector must come from the model's registry and carry
/// every subset feature unmasked.
pub fn predict(model: &RegressionModel, vector: &FeatureVector, registry: &FeatureRegistry) -> Result<f64> {
    model.check_registry(registry)?;
    model.predict_with(|name| vector.get(registry, name))
}

/// R² of the model's predictions on the given rows.
pub fn r_squared(model: &RegressionModel, rows: &[FeatureVector], registry: &FeatureRegistry) -> Result<f64> {
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for r in rows {
        if let Some(g) = r.grade {
            gold.push(g as f64);
            pred.push(predict(model, r, registry)?);
        }
    }
    r_squared_of(&gold, &pred)
}
