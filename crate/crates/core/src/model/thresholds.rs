use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One representative predicted score per level, used to snap continuous
/// scores to level labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelThresholds {
    pub levels: Vec<i64>,
    pub centroids: Vec<f64>,
    pub min_score: f64,
    pub max_score: f64,
    /// Pool-adjacent-violators had to merge inverted level means.
    pub pooled: bool,
    /// Levels without training data, placed by inter/extrapolation.
    pub extrapolated: Vec<i64>,
}

/// Weighted pool-adjacent-violators: the nondecreasing sequence closest to
/// `values` in weighted least squares.
fn pav(values: &[f64], weights: &[f64]) -> Vec<f64> {
    // blocks of (mean, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.pop();
            let w = w1 + w2;
            *blocks.last_mut().expect("len > 1") = ((m1 * w1 + m2 * w2) / w, w, l1 + l2);
        }
    }
    blocks.into_iter().flat_map(|(m, _, l)| std::iter::repeat_n(m, l)).collect()
}

/// Centroid per level = mean training score of documents at that level,
/// made monotone by pooling. Levels without data are interpolated between
/// neighbours or extrapolated at the mean spacing, clamped to the training
/// score range, and flagged.
pub fn fit_thresholds(train: &[(i64, f64)], levels: &[i64]) -> Result<LevelThresholds> {
    if train.is_empty() {
        return Err(Error::Config("no training scores for thresholds".into()));
    }
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("levels must be non-empty and strictly increasing".into()));
    }
    let min_score = train.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    let max_score = train.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let mut sums = vec![(0.0, 0usize); levels.len()];
    for &(level, score) in train {
        if let Ok(i) = levels.binary_search(&level) {
            sums[i].0 += score;
            sums[i].1 += 1;
        }
    }
    let present: Vec<usize> = (0..levels.len()).filter(|&i| sums[i].1 > 0).collect();
    if present.is_empty() {
        return Err(Error::Config("no training score carries one of the requested levels".into()));
    }
    let means: Vec<f64> = present.iter().map(|&i| sums[i].0 / sums[i].1 as f64).collect();
    let weights: Vec<f64> = present.iter().map(|&i| sums[i].1 as f64).collect();
    let fitted = pav(&means, &weights);
    let pooled = fitted != means;

    let mut centroids = vec![f64::NAN; levels.len()];
    for (&i, &c) in present.iter().zip(&fitted) {
        centroids[i] = c;
    }
    let first = present[0];
    let last = *present.last().expect("non-empty");
    let spacing = if last > first {
        (centroids[last] - centroids[first]) / (last - first) as f64
    } else {
        0.0
    };
    let mut extrapolated = Vec::new();
    for i in 0..levels.len() {
        if !centroids[i].is_nan() {
            continue;
        }
        extrapolated.push(levels[i]);
        let c = if i < first {
            centroids[first] - spacing * (first - i) as f64
        } else if i > last {
            centroids[last] + spacing * (i - last) as f64
        } else {
            let lo = present.iter().rev().find(|&&p| p < i).copied().expect("i > first");
            let hi = present.iter().find(|&&p| p > i).copied().expect("i < last");
            let t = (i - lo) as f64 / (hi - lo) as f64;
            centroids[lo] + t * (centroids[hi] - centroids[lo])
        };
        centroids[i] = c.clamp(min_score, max_score);
    }
    Ok(LevelThresholds {
        levels: levels.to_vec(),
        centroids,
        min_score,
        max_score,
        pooled,
        extrapolated,
    })
}

/// Nearest centroid; below the training minimum the lowest level, above the
/// maximum the highest. Equidistant scores go to the lower level.
pub fn classify(score: f64, th: &LevelThresholds) -> i64 {
    if score.is_nan() || score <= th.min_score {
        return th.levels[0];
    }
    if score >= th.max_score {
        return *th.levels.last().expect("fitted thresholds are non-empty");
    }
    let mut best = 0;
    let mut best_d = (score - th.centroids[0]).abs();
    for (i, &c) in th.centroids.iter().enumerate().skip(1) {
        let d = (score - c).abs();
        // a fitted level wins over an extrapolated one clamped onto the same centroid
        let fitted_over_placeholder = c == th.centroids[best]
            && th.extrapolated.contains(&th.levels[best])
            && !th.extrapolated.contains(&th.levels[i]);
        if d < best_d || fitted_over_placeholder {
            best = i;
            best_d = d;
        }
    }
    th.levels[best]
}
