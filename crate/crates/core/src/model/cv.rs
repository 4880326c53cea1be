use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::least_squares;
use super::metrics::{accuracy, pearson, rmse, tad};
use super::selection::forward_select;
use super::thresholds::{classify, fit_thresholds};
use super::Dataset;
use crate::{Error, Result};

/// What gets trained inside each fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pipeline {
    /// OLS on a fixed feature list; columns collinear within a training
    /// fold get a zero slope.
    Fixed { features: Vec<String> },
    /// Forward selection on the training fold, then the BIC-chosen subset.
    ForwardSelectBic {
        alpha_enter: f64,
        #[serde(default)]
        candidates: Option<Vec<String>>,
    },
    /// A precomputed score column used as is (negated if asked), e.g. a
    /// classic readability formula. Only the level thresholds are trained.
    RawScore { column: String, negate: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub reps: usize,
    pub seed: u64,
    /// Level labels for thresholds; defaults to the distinct gold grades.
    #[serde(default)]
    pub levels: Option<Vec<i64>>,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            reps: 5,
            seed: 42,
            levels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub rep: usize,
    pub fold: usize,
    /// Row indices of the test part, ascending.
    pub test: Vec<usize>,
    pub subset: Vec<String>,
    /// Subset features whose slope was forced to zero in this fold.
    pub pruned: Vec<String>,
    pub rmse: f64,
    pub r: Option<f64>,
    pub predictions: Vec<f64>,
    pub predicted_levels: Vec<i64>,
}

/// Metrics over one repetition's pooled out-of-fold predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepSummary {
    pub rep: usize,
    pub rmse: f64,
    pub r: Option<f64>,
    pub level_rmse: f64,
    pub accuracy: f64,
    pub tad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub config: CvConfig,
    pub pipeline: Pipeline,
    pub n: usize,
    pub levels: Vec<i64>,
    pub folds: Vec<FoldResult>,
    pub reps: Vec<RepSummary>,
    /// Mean of per-fold continuous RMSE over folds × repetitions.
    pub mean_rmse: f64,
    /// Mean of per-fold r over the folds where it is defined.
    pub mean_r: Option<f64>,
    /// Means of the per-repetition pooled level metrics.
    pub mean_level_rmse: f64,
    pub mean_accuracy: f64,
    pub mean_tad: f64,
    /// Mean of the per-repetition pooled r (continuous predictions).
    pub pooled_r: Option<f64>,
}

/// Test folds for one repetition: a seeded shuffle of 0..n cut into
/// `folds` contiguous parts whose sizes differ by at most one.
pub fn fold_partition(n: usize, folds: usize, seed: u64, rep: usize) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    idx.shuffle(&mut rng);
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        let mut part = idx[start..start + len].to_vec();
        part.sort_unstable();
        out.push(part);
        start += len;
    }
    out
}

struct Trained {
    subset: Vec<String>,
    pruned: Vec<String>,
    intercept: f64,
    slopes: Vec<f64>,
    negate: bool,
}

impl Trained {
    fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        let cols = data.columns_for(&self.subset)?;
        let sign = if self.negate { -1.0 } else { 1.0 };
        Ok((0..data.n())
            .map(|i| sign * (self.intercept + cols.iter().zip(&self.slopes).map(|(c, b)| b * c[i]).sum::<f64>()))
            .collect())
    }
}

fn ols(train: &Dataset, subset: Vec<String>) -> Result<Trained> {
    let cols = train.columns_for(&subset)?;
    let ls = least_squares(&cols, &train.y);
    Ok(Trained {
        pruned: ls.dropped.iter().map(|&j| subset[j].clone()).collect(),
        subset,
        intercept: ls.intercept,
        slopes: ls.beta,
        negate: false,
    })
}

fn train(pipeline: &Pipeline, data: &Dataset) -> Result<Trained> {
    match pipeline {
        Pipeline::Fixed { features } => ols(data, features.clone()),
        Pipeline::ForwardSelectBic { alpha_enter, candidates } => {
            let trace = forward_select(data, candidates.as_deref(), *alpha_enter)?;
            ols(data, trace.chosen_subset().map(<[String]>::to_vec).unwrap_or_default())
        }
        Pipeline::RawScore { column, negate } => {
            data.column(column)?;
            Ok(Trained {
                subset: vec![column.clone()],
                pruned: vec![],
                intercept: 0.0,
                slopes: vec![1.0],
                negate: *negate,
            })
        }
    }
}

fn level_of(y: f64) -> i64 {
    y.round() as i64
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (c > 0).then(|| s / c as f64)
}

/// Repeated k-fold cross-validation. Folds run in parallel; every result
/// depends only on (data, pipeline, config), never on scheduling.
pub fn cross_validate(data: &Dataset, pipeline: &Pipeline, config: &CvConfig) -> Result<CvReport> {
    let n = data.n();
    if config.folds < 2 {
        return Err(Error::Config("cross-validation needs at least 2 folds".into()));
    }
    if config.reps == 0 {
        return Err(Error::Config("cross-validation needs at least 1 repetition".into()));
    }
    if n < config.folds {
        return Err(Error::Config(format!("{n} rows cannot fill {} folds", config.folds)));
    }
    let levels = match &config.levels {
        Some(l) => l.clone(),
        None => {
            let mut l: Vec<i64> = data.y.iter().map(|&y| level_of(y)).collect();
            l.sort_unstable();
            l.dedup();
            l
        }
    };
    let partitions: Vec<Vec<Vec<usize>>> =
        (0..config.reps).map(|rep| fold_partition(n, config.folds, config.seed, rep)).collect();
    let tasks: Vec<(usize, usize)> =
        (0..config.reps).flat_map(|rep| (0..config.folds).map(move |fold| (rep, fold))).collect();

    let folds: Vec<FoldResult> = tasks
        .par_iter()
        .map(|&(rep, fold)| {
            let test = partitions[rep][fold].clone();
            let mut in_test = vec![false; n];
            for &i in &test {
                in_test[i] = true;
            }
            let train_idx: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
            let train_data = data.select_rows(&train_idx);
            let test_data = data.select_rows(&test);
            let model = train(pipeline, &train_data)?;
            let train_pred = model.predict(&train_data)?;
            let pairs: Vec<(i64, f64)> =
                train_data.y.iter().zip(&train_pred).map(|(&y, &p)| (level_of(y), p)).collect();
            let th = fit_thresholds(&pairs, &levels)?;
            let predictions = model.predict(&test_data)?;
            let predicted_levels = predictions.iter().map(|&p| classify(p, &th)).collect();
            Ok(FoldResult {
                rep,
                fold,
                rmse: rmse(&test_data.y, &predictions)?,
                r: pearson(&test_data.y, &predictions).ok(),
                test,
                subset: model.subset,
                pruned: model.pruned,
                predictions,
                predicted_levels,
            })
        })
        .collect::<Result<_>>()?;

    let mut reps = Vec::with_capacity(config.reps);
    for rep in 0..config.reps {
        let mut pred = vec![0.0; n];
        let mut pred_level = vec![0i64; n];
        for f in folds.iter().filter(|f| f.rep == rep) {
            for (k, &i) in f.test.iter().enumerate() {
                pred[i] = f.predictions[k];
                pred_level[i] = f.predicted_levels[k];
            }
        }
        let gold_level: Vec<i64> = data.y.iter().map(|&y| level_of(y)).collect();
        let pred_level_f: Vec<f64> = pred_level.iter().map(|&l| l as f64).collect();
        reps.push(RepSummary {
            rep,
            rmse: rmse(&data.y, &pred)?,
            r: pearson(&data.y, &pred).ok(),
            level_rmse: rmse(&data.y, &pred_level_f)?,
            accuracy: accuracy(&gold_level, &pred_level)?,
            tad: if n >= 2 { tad(&data.y, &pred_level_f)? } else { 0.0 },
        });
    }

    Ok(CvReport {
        config: config.clone(),
        pipeline: pipeline.clone(),
        n,
        levels,
        mean_rmse: mean(folds.iter().map(|f| f.rmse)).expect("at least one fold"),
        mean_r: mean(folds.iter().filter_map(|f| f.r)),
        mean_level_rmse: mean(reps.iter().map(|r| r.level_rmse)).expect("reps > 0"),
        mean_accuracy: mean(reps.iter().map(|r| r.accuracy)).expect("reps > 0"),
        mean_tad: mean(reps.iter().map(|r| r.tad)).expect("reps > 0"),
        pooled_r: mean(reps.iter().filter_map(|r| r.r)),
        folds,
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_law() {
        for rep in 0..3 {
            let parts = fold_partition(10, 5, 7, rep);
            assert!(parts.iter().all(|p| p.len() == 2));
            let mut all: Vec<usize> = parts.concat();
            all.sort_unstable();
            assert_eq!(all, (0..10).collect::<Vec<_>>());
        }
        let sizes: Vec<usize> = fold_partition(103, 5, 1, 0).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![21, 21, 21, 20, 20]);
        assert_ne!(fold_partition(50, 5, 1, 0), fold_partition(50, 5, 1, 1));
        assert_eq!(fold_partition(50, 5, 1, 3), fold_partition(50, 5, 1, 3));
    }

    #[test]
    fn noiseless_linear_data() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.5 * v - 0.25).collect();
        let d = Dataset::new((0..40).map(|i| i.to_string()).collect(), vec!["x".into()], vec![x], y).unwrap();
        let rep = cross_validate(&d, &Pipeline::Fixed { features: vec!["x".into()] }, &CvConfig::default()).unwrap();
        assert!(rep.mean_rmse < 1e-9);
        assert_eq!(rep.folds.len(), 25);
    }

    #[test]
    fn too_few_rows() {
        let d = Dataset::new(vec!["a".into()], vec![], vec![], vec![1.0]).unwrap();
        assert!(matches!(
            cross_validate(&d, &Pipeline::Fixed { features: vec![] }, &CvConfig::default()),
            Err(Error::Config(_))
        ));
    }
}
