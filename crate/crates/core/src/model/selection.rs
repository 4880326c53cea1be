use serde::{Deserialize, Serialize};

use super::linalg::{least_squares, COLLINEARITY_TOL};
use super::metrics::pearson;
use super::special::f_sf;
use super::Dataset;
use crate::{Error, Result};

/// Summary of one OLS fit used during selection.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub subset: Vec<String>,
    pub n: usize,
    /// Number of slopes.
    pub k: usize,
    pub rss: f64,
    pub tss: f64,
    pub intercept: f64,
    pub beta: Vec<f64>,
}

impl LinearFit {
    pub fn fit(data: &Dataset, subset: &[String]) -> Result<Self> {
        let cols = data.columns_for(subset)?;
        let ls = least_squares(&cols, &data.y);
        if !ls.dropped.is_empty() {
            return Err(Error::SingularDesign {
                features: ls.dropped.iter().map(|&j| subset[j].clone()).collect(),
            });
        }
        Ok(LinearFit {
            subset: subset.to_vec(),
            n: data.n(),
            k: subset.len(),
            rss: ls.rss,
            tss: ls.tss,
            intercept: ls.intercept,
            beta: ls.beta,
        })
    }

    /// Intercept-only model.
    pub fn null(data: &Dataset) -> Self {
        Self::fit(data, &[]).expect("empty design is never singular")
    }

    pub fn r_squared(&self) -> f64 {
        if self.tss > 0.0 {
            1.0 - self.rss / self.tss
        } else {
            1.0
        }
    }

    pub fn rmse(&self) -> f64 {
        (self.rss / self.n as f64).sqrt()
    }

    /// Multiple correlation R = sqrt(R²); None for a constant response.
    pub fn r(&self) -> Option<f64> {
        (self.tss > 0.0).then(|| self.r_squared().max(0.0).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FTest {
    #[serde(with = "super::nonfinite")]
    pub f: f64,
    pub p_value: f64,
    pub df1: usize,
    pub df2: usize,
}

/// ANOVA F-test for adding one feature:
/// F = (R²new − R²old) / ((1 − R²new) / (n − kNew − 1)) on (1, n − kNew − 1).
pub fn increment_f_test(old: &LinearFit, new: &LinearFit) -> Result<FTest> {
    if new.k != old.k + 1 || new.n != old.n {
        return Err(Error::Config("F-test needs nested models differing by one feature on the same rows".into()));
    }
    if new.n <= new.k + 1 {
        return Err(Error::Config(format!("F-test needs n > k + 1 (n = {}, k = {})", new.n, new.k)));
    }
    let df2 = new.n - new.k - 1;
    let gain = (new.r_squared() - old.r_squared()).max(0.0);
    let resid = 1.0 - new.r_squared();
    let f = if resid <= 0.0 || new.rss <= 0.0 {
        f64::INFINITY
    } else if gain == 0.0 {
        0.0
    } else {
        gain / (resid / df2 as f64)
    };
    Ok(FTest {
        f,
        p_value: f_sf(f, 1.0, df2 as f64),
        df1: 1,
        df2,
    })
}

/// BIC = n·ln(RSS/n) + ln(n)·k with k counting slopes.
pub fn bic(n: usize, rss: f64, k: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("BIC needs n >= 1".into()));
    }
    if rss <= 0.0 {
        return Err(Error::BicUndefined);
    }
    let n = n as f64;
    Ok(n * (rss / n).ln() + n.ln() * k as f64)
}

/// [`bic`] with RSS = 0 reported as −∞.
pub fn bic_or_sentinel(n: usize, rss: f64, k: usize) -> f64 {
    match bic(n, rss, k) {
        Err(Error::BicUndefined) => f64::NEG_INFINITY,
        other => other.unwrap_or(f64::NAN),
    }
}

/// The candidate's residual after regressing it on `subset`, or None when
/// that residual has (relatively) no variance left.
fn residualize(data: &Dataset, subset: &[String], candidate: &str) -> Result<Option<Vec<f64>>> {
    let x = data.column(candidate)?;
    let cols = data.columns_for(subset)?;
    let ls = least_squares(&cols, x);
    let own = ls.tss;
    if own == 0.0 || ls.rss < COLLINEARITY_TOL * own {
        return Ok(None);
    }
    Ok(Some(ls.residuals))
}

/// Correlation between y and the part of `candidate` not explained by
/// `subset` (with intercept). Equals pearson(y, candidate) for an empty
/// subset; 0 for a candidate collinear with the subset.
pub fn semi_partial_r(data: &Dataset, subset: &[String], candidate: &str) -> Result<f64> {
    match residualize(data, subset, candidate)? {
        None => Ok(0.0),
        Some(e) => pearson(&data.y, &e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub step: usize,
    pub added_feature: String,
    pub subset: Vec<String>,
    pub n: usize,
    pub rmse: f64,
    pub r: Option<f64>,
    pub r_squared: f64,
    #[serde(with = "super::nonfinite")]
    pub bic: f64,
    pub rss: f64,
    #[serde(with = "super::nonfinite")]
    pub semi_partial_r: f64,
    #[serde(with = "super::nonfinite")]
    pub f_statistic: f64,
    #[serde(with = "super::nonfinite")]
    pub p_value: f64,
    pub accepted: bool,
    /// Cross-validated RMSE and r of this step's subset, when computed.
    #[serde(default)]
    pub cv_rmse: Option<f64>,
    #[serde(default)]
    pub cv_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedCandidate {
    pub step: usize,
    pub feature: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub alpha_enter: f64,
    pub n: usize,
    pub steps: Vec<SelectionStep>,
    pub skipped: Vec<SkippedCandidate>,
    /// Every candidate fitted at once, collinear columns pruned.
    pub all: Option<SelectionStep>,
    #[serde(default)]
    pub excluded_rows: Vec<String>,
    #[serde(default)]
    pub dropped_features: Vec<String>,
    pub chosen: Option<usize>,
}

impl SelectionTrace {
    pub fn chosen_subset(&self) -> Option<&[String]> {
        self.chosen.map(|i| self.steps[i].subset.as_slice())
    }

    pub fn accepted_subset(&self) -> Vec<String> {
        self.steps.iter().filter(|s| s.accepted).map(|s| s.added_feature.clone()).collect()
    }
}

fn step_record(step: usize, added: &str, fit: &LinearFit, sr: f64, ft: Option<FTest>, accepted: bool) -> SelectionStep {
    SelectionStep {
        step,
        added_feature: added.to_string(),
        subset: fit.subset.clone(),
        n: fit.n,
        rmse: fit.rmse(),
        r: fit.r(),
        r_squared: fit.r_squared(),
        bic: bic_or_sentinel(fit.n, fit.rss, fit.k),
        rss: fit.rss,
        semi_partial_r: sr,
        f_statistic: ft.map_or(f64::NAN, |t| t.f),
        p_value: ft.map_or(f64::NAN, |t| t.p_value),
        accepted,
        cv_rmse: None,
        cv_r: None,
    }
}

/// Forward selection: seed with the highest |pearson| feature, then keep
/// adding the highest |semi-partial r| candidate while its incremental
/// F-test has p < `alpha_enter`. Candidates collinear with the current
/// subset are skipped and noted.
pub fn forward_select(data: &Dataset, candidates: Option<&[String]>, alpha_enter: f64) -> Result<SelectionTrace> {
    if data.n() < 10 {
        return Err(Error::Config(format!("forward selection needs at least 10 complete rows, got {}", data.n())));
    }
    if !(0.0..=1.0).contains(&alpha_enter) {
        return Err(Error::Config(format!("alpha_enter {alpha_enter} outside [0, 1]")));
    }
    let mut remaining: Vec<String> = candidates.map_or_else(|| data.names.clone(), <[String]>::to_vec);
    data.columns_for(&remaining)?;
    if crate::model::metrics::pearson(&data.y, &data.y).is_err() {
        return Err(Error::UndefinedCorrelation("response has zero variance".into()));
    }

    let mut trace = SelectionTrace {
        alpha_enter,
        n: data.n(),
        steps: Vec::new(),
        skipped: Vec::new(),
        all: None,
        excluded_rows: Vec::new(),
        dropped_features: Vec::new(),
        chosen: None,
    };
    let mut subset: Vec<String> = Vec::new();
    let mut current = LinearFit::null(data);
    while !remaining.is_empty() && data.n() > subset.len() + 2 {
        let step = trace.steps.len() + 1;
        let mut best: Option<(usize, f64)> = None;
        let mut unselectable = Vec::new();
        for (i, cand) in remaining.iter().enumerate() {
            match residualize(data, &subset, cand)? {
                None => unselectable.push(i),
                Some(e) => {
                    let sr = pearson(&data.y, &e)?;
                    if best.is_none_or(|(_, b)| sr.abs() > b.abs()) {
                        best = Some((i, sr));
                    }
                }
            }
        }
        for &i in unselectable.iter().rev() {
            let feature = remaining.remove(i);
            let reason = if subset.is_empty() { "constant" } else { "collinear with current subset" };
            trace.skipped.push(SkippedCandidate { step, feature, reason: reason.into() });
            if let Some((b, _)) = best.as_mut() {
                if *b > i {
                    *b -= 1;
                }
            }
        }
        let Some((i, sr)) = best else { break };
        let cand = remaining.remove(i);
        let mut next = subset.clone();
        next.push(cand.clone());
        let fit = match LinearFit::fit(data, &next) {
            Ok(f) => f,
            Err(Error::SingularDesign { .. }) => {
                trace.skipped.push(SkippedCandidate { step, feature: cand, reason: "singular design".into() });
                continue;
            }
            Err(e) => return Err(e),
        };
        let ft = increment_f_test(&current, &fit)?;
        let accepted = subset.is_empty() || ft.p_value < alpha_enter;
        trace.steps.push(step_record(step, &cand, &fit, sr, Some(ft), accepted));
        if !accepted {
            break;
        }
        subset = next;
        current = fit;
    }

    let all_names: Vec<String> = candidates.map_or_else(|| data.names.clone(), <[String]>::to_vec);
    if !all_names.is_empty() {
        let cols = data.columns_for(&all_names)?;
        let ls = least_squares(&cols, &data.y);
        let kept: Vec<String> = all_names
            .iter()
            .enumerate()
            .filter(|(j, _)| !ls.dropped.contains(j))
            .map(|(_, n)| n.clone())
            .collect();
        if data.n() > kept.len() + 1 {
            let fit = LinearFit::fit(data, &kept)?;
            trace.all = Some(step_record(0, "all", &fit, f64::NAN, None, false));
        }
    }
    trace.chosen = select_by_bic(&trace);
    Ok(trace)
}

/// Index of the accepted step with the lowest BIC; ties go to the earlier
/// (smaller) model. None for a trace without accepted steps.
pub fn select_by_bic(trace: &SelectionTrace) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in trace.steps.iter().enumerate() {
        if !s.accepted || s.bic.is_nan() {
            continue;
        }
        if best.is_none_or(|(_, b)| s.bic < b) {
            best = Some((i, s.bic));
        }
    }
    best.map(|(i, _)| i)
}
