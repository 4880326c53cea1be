//! Evaluation reports: per-category models (`table1`), single-feature
//! regressions (`table2`), the forward-selection trace (`table3`) and the
//! estimator comparison (`table5`).

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, PronunciationLexicon};
use crate::features::{Category, FeatureRegistry, FeatureVector};
use crate::model::{
    classic_formulas, cross_validate, forward_select, least_squares, pearson, CvConfig, CvReport, Dataset, Exclusions,
    Pipeline, SelectionTrace, CLASSIC_NAMES,
};
use crate::{Error, Result};

/// A rendered table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 strings"))
    }

    /// A copy with decimal cells rounded to 3 places, for reading.
    pub fn rounded(&self) -> Table {
        Table {
            rows: self.rows.iter().map(|r| r.iter().map(|c| short(c)).collect()).collect(),
            ..self.clone()
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("### {}\n\n| {} |\n|", self.title, self.headers.join(" | "));
        out.push_str(&" --- |".repeat(self.headers.len()));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("| {} |\n", r.join(" | ")));
        }
        out
    }
}

fn full(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(full).unwrap_or_default()
}

fn short(cell: &str) -> String {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() && cell.contains('.') => format!("{v:.3}"),
        _ => cell.to_string(),
    }
}

/// One Table-1 row: a model over one feature group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub category: String,
    pub label: String,
    pub features: Vec<String>,
    pub rmse: f64,
    pub r: Option<f64>,
}

/// One Table-2 row: a single-feature regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub rank: usize,
    pub category: String,
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    /// Fitted on all rows.
    pub rmse: f64,
    pub r: Option<f64>,
    /// Cross-validated.
    pub cv_rmse: f64,
    pub cv_r: Option<f64>,
}

/// One Table-5 row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorRow {
    pub estimator: String,
    /// RMSE of thresholded levels against gold grades.
    pub rmse: f64,
    pub r: Option<f64>,
    pub accuracy: f64,
    pub tad: f64,
    /// RMSE of the continuous score (meaningful for the regression model only).
    pub continuous_rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub cv: CvConfig,
    pub alpha_enter: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            cv: CvConfig::default(),
            alpha_enter: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: EvalConfig,
    pub n: usize,
    pub exclusions: Exclusions,
    pub categories: Vec<CategoryRow>,
    pub features: Vec<FeatureRow>,
    pub selection: SelectionTrace,
    pub estimators: Vec<EstimatorRow>,
    /// Cross-validation of the proposed pipeline, for drill-down.
    pub proposed_cv: CvReport,
}

fn category_label(c: Category) -> &'static str {
    match c {
        Category::Baseline => "Baseline",
        Category::Aoa => "AOA",
        Category::Frequency => "Frequency",
        Category::Parsing => "Parsing",
        Category::Grammar => "Grammar",
        Category::Semantic => "Semantic",
        Category::Coreference => "Coreference",
    }
}

/// The Table-1 feature groups over the default registry names.
pub fn category_groups(registry: &FeatureRegistry) -> Vec<(String, String, Vec<String>)> {
    let names = |pred: &dyn Fn(&str) -> bool| -> Vec<String> {
        registry.names().filter(|n| pred(n)).map(String::from).collect()
    };
    let of = |c: Category| registry.in_category(c).into_iter().map(String::from).collect::<Vec<_>>();
    vec![
        ("Baseline".into(), "baseline-only".into(), of(Category::Baseline)),
        ("AOA".into(), "gept-only".into(), names(&|n| n.starts_with("gept"))),
        ("AOA".into(), "vq-only".into(), names(&|n| n.starts_with("vq"))),
        ("Coreference".into(), "coreference-only".into(), of(Category::Coreference)),
        ("Parsing".into(), "parsing-only".into(), of(Category::Parsing)),
        ("Grammar".into(), "grammar-only".into(), of(Category::Grammar)),
        ("Semantic".into(), "wordnet-only".into(), of(Category::Semantic)),
        ("Frequency".into(), "bnc_frequency".into(), names(&|n| n == "bnc_frequency")),
        ("Frequency".into(), "google_search_count".into(), names(&|n| n == "google_search_count")),
    ]
}

/// Display names of the classic estimators, in [`CLASSIC_NAMES`] order.
pub const CLASSIC_LABELS: [&str; 3] = ["Flesch Reading Ease", "Flesch-Kincaid Grade Level", "Coleman-Liau"];

/// Runs the whole evaluation. `documents` supply the classic formulas and
/// must contain every vector's document (matched by id).
pub fn evaluate(
    vectors: &[FeatureVector],
    documents: &[Document],
    registry: &FeatureRegistry,
    pronunciations: Option<&PronunciationLexicon>,
    config: &EvalConfig,
) -> Result<EvaluationReport> {
    let (data, exclusions) = Dataset::from_vectors(vectors, registry, None)?;
    if data.n() < config.cv.folds.max(10) {
        return Err(Error::Config(format!("only {} complete graded rows; evaluation needs at least 10", data.n())));
    }
    let by_id: HashMap<&str, &Document> = documents.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut classic_cols = vec![Vec::new(); 3];
    for id in &data.ids {
        let doc = by_id
            .get(id.as_str())
            .ok_or_else(|| Error::Config(format!("no document for feature row '{id}'")))?;
        let scores = classic_formulas(doc, pronunciations).map_err(|e| Error::in_document(id, e))?;
        let s = [scores.flesch_reading_ease, scores.flesch_kincaid_grade, scores.coleman_liau];
        for (c, v) in classic_cols.iter_mut().zip(s) {
            c.push(v);
        }
    }
    let mut with_classic = data.clone();
    for (name, col) in CLASSIC_NAMES.iter().zip(classic_cols) {
        with_classic = with_classic.with_column(*name, col)?;
    }

    let available = |fs: &[String]| -> Vec<String> { fs.iter().filter(|f| data.column_index(f).is_some()).cloned().collect() };

    let categories = category_groups(registry)
        .into_par_iter()
        .filter_map(|(category, label, fs)| {
            let fs = available(&fs);
            (!fs.is_empty()).then_some((category, label, fs))
        })
        .map(|(category, label, fs)| {
            let cv = cross_validate(&data, &Pipeline::Fixed { features: fs.clone() }, &config.cv)?;
            Ok(CategoryRow { category, label, features: fs, rmse: cv.mean_rmse, r: cv.mean_r })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut features = data
        .names
        .par_iter()
        .enumerate()
        .map(|(j, name)| {
            let ls = least_squares(&[&data.columns[j]], &data.y);
            let fitted: Vec<f64> = data.y.iter().zip(&ls.residuals).map(|(y, e)| y - e).collect();
            let cv = cross_validate(&data, &Pipeline::Fixed { features: vec![name.clone()] }, &config.cv)?;
            let category = registry
                .index_of(name)
                .map(|i| category_label(registry.features()[i].category))
                .unwrap_or("");
            Ok(FeatureRow {
                rank: 0,
                category: category.to_string(),
                name: name.clone(),
                slope: ls.beta[0],
                intercept: ls.intercept,
                rmse: (ls.rss / data.n() as f64).sqrt(),
                r: pearson(&data.y, &fitted).ok(),
                cv_rmse: cv.mean_rmse,
                cv_r: cv.mean_r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    features.sort_by(|a, b| a.rmse.total_cmp(&b.rmse).then_with(|| a.name.cmp(&b.name)));
    for (i, f) in features.iter_mut().enumerate() {
        f.rank = i + 1;
    }

    let mut selection = forward_select(&data, None, config.alpha_enter)?;
    selection.excluded_rows = exclusions.rows.clone();
    selection.dropped_features = exclusions.features.clone();
    let step_cv = selection
        .steps
        .par_iter()
        .map(|s| cross_validate(&data, &Pipeline::Fixed { features: s.subset.clone() }, &config.cv))
        .collect::<Result<Vec<_>>>()?;
    for (s, cv) in selection.steps.iter_mut().zip(step_cv) {
        s.cv_rmse = Some(cv.mean_rmse);
        s.cv_r = cv.mean_r;
    }
    if let Some(all) = selection.all.as_mut() {
        let cv = cross_validate(&data, &Pipeline::Fixed { features: all.subset.clone() }, &config.cv)?;
        all.cv_rmse = Some(cv.mean_rmse);
        all.cv_r = cv.mean_r;
    }

    let proposed = Pipeline::ForwardSelectBic { alpha_enter: config.alpha_enter, candidates: None };
    let proposed_cv = cross_validate(&data, &proposed, &config.cv)?;
    let row = |label: &str, cv: &CvReport| EstimatorRow {
        estimator: label.to_string(),
        rmse: cv.mean_level_rmse,
        r: cv.mean_r,
        accuracy: cv.mean_accuracy,
        tad: cv.mean_tad,
        continuous_rmse: cv.mean_rmse,
    };
    let mut estimators = CLASSIC_NAMES
        .par_iter()
        .zip(CLASSIC_LABELS)
        .map(|(column, label)| {
            let pipeline = Pipeline::RawScore {
                column: column.to_string(),
                // higher Reading Ease means easier text
                negate: *column == "flesch_reading_ease",
            };
            Ok(row(label, &cross_validate(&with_classic, &pipeline, &config.cv)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let chosen = selection.chosen_subset().map(|s| s.join("+")).unwrap_or_default();
    estimators.push(row(&format!("Proposed (selection + BIC; full-data choice: {chosen})"), &proposed_cv));

    Ok(EvaluationReport {
        config: config.clone(),
        n: data.n(),
        exclusions,
        categories,
        features,
        selection,
        estimators,
        proposed_cv,
    })
}

pub fn table1(rows: &[CategoryRow]) -> Table {
    Table {
        name: "table1_categories".into(),
        title: "RMSE and correlation by feature category".into(),
        headers: ["Categories", "Features", "RMSE", "r"].map(String::from).to_vec(),
        rows: rows
            .iter()
            .map(|r| vec![r.category.clone(), r.label.clone(), full(r.rmse), opt(r.r)])
            .collect(),
    }
}

pub fn table2(rows: &[FeatureRow]) -> Table {
    Table {
        name: "table2_features".into(),
        title: "Single-feature regressions".into(),
        headers: ["Rank", "Categories", "Name", "Regression", "Slope", "Intercept", "RMSE", "r", "CV RMSE", "CV r"]
            .map(String::from)
            .to_vec(),
        rows: rows
            .iter()
            .map(|r| {
                let sign = if r.intercept < 0.0 { "-" } else { "+" };
                vec![
                    r.rank.to_string(),
                    r.category.clone(),
                    r.name.clone(),
                    format!("y = {:.4} * {} {sign} {:.4}", r.slope, r.name, r.intercept.abs()),
                    full(r.slope),
                    full(r.intercept),
                    full(r.rmse),
                    opt(r.r),
                    full(r.cv_rmse),
                    opt(r.cv_r),
                ]
            })
            .collect(),
    }
}

fn bic_cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v < 0.0 { "-inf" } else { "inf" }.into()
    } else {
        full(v)
    }
}

pub fn table3(trace: &SelectionTrace) -> Table {
    let mut rows: Vec<Vec<String>> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                s.step.to_string(),
                s.added_feature.clone(),
                full(s.rmse),
                opt(s.r),
                bic_cell(s.bic),
                full(s.rss),
                bic_cell(s.f_statistic),
                bic_cell(s.p_value),
                if s.accepted { "yes" } else { "no" }.into(),
                if trace.chosen == Some(i) { "*" } else { "" }.into(),
                opt(s.cv_rmse),
                opt(s.cv_r),
            ]
        })
        .collect();
    if let Some(a) = &trace.all {
        rows.push(vec![
            String::new(),
            "all".into(),
            full(a.rmse),
            opt(a.r),
            bic_cell(a.bic),
            full(a.rss),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            opt(a.cv_rmse),
            opt(a.cv_r),
        ]);
    }
    Table {
        name: "table3_selection".into(),
        title: "Forward selection trace".into(),
        headers: ["Model", "Added Feature", "RMSE", "r", "BIC", "RSS", "F", "p", "Accepted", "Chosen", "CV RMSE", "CV r"]
            .map(String::from)
            .to_vec(),
        rows,
    }
}

pub fn table5(rows: &[EstimatorRow]) -> Table {
    Table {
        name: "table5_estimators".into(),
        title: "Comparison between the estimators".into(),
        headers: ["Estimations", "RMSE", "r", "Accuracy", "TAD", "Continuous RMSE"].map(String::from).to_vec(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.estimator.clone(),
                    full(r.rmse),
                    opt(r.r),
                    full(r.accuracy),
                    full(r.tad),
                    full(r.continuous_rmse),
                ]
            })
            .collect(),
    }
}

impl EvaluationReport {
    pub fn tables(&self) -> Vec<Table> {
        vec![
            table1(&self.categories),
            table2(&self.features),
            table3(&self.selection),
            table5(&self.estimators),
        ]
    }

    /// All tables as one Markdown document, numbers rounded to 3 places.
    pub fn to_markdown(&self) -> String {
        let mut out = format!("# Evaluation report\n\n{} documents, {}-fold cross-validation x {} repetitions, seed {}.\n\n",
            self.n, self.config.cv.folds, self.config.cv.reps, self.config.cv.seed);
        for t in self.tables() {
            out.push_str(&t.rounded().to_markdown());
            out.push('\n');
        }
        out
    }

    /// Writes `<table>.csv` per table, `report.md` and `report.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for t in self.tables() {
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv()?)?;
        }
        std::fs::write(dir.join("report.md"), self.to_markdown())?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
