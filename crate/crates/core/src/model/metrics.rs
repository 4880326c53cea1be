use crate::{Error, Result};

fn check_lengths(gold: usize, pred: usize, min: usize) -> Result<()> {
    if gold != pred {
        return Err(Error::Config(format!("length mismatch: {gold} gold vs {pred} predicted")));
    }
    if gold < min {
        return Err(Error::Config(format!("need at least {min} values, got {gold}")));
    }
    Ok(())
}

pub fn rmse(gold: &[f64], pred: &[f64]) -> Result<f64> {
    check_lengths(gold.len(), pred.len(), 1)?;
    let ss: f64 = gold.iter().zip(pred).map(|(g, p)| (g - p) * (g - p)).sum();
    Ok((ss / gold.len() as f64).sqrt())
}

/// Pearson correlation. Zero variance on either side is an error, never 0.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a.len(), b.len(), 2)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation(if saa == 0.0 {
            "first argument has zero variance".into()
        } else {
            "second argument has zero variance".into()
        }));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// 1 - RSS/TSS of predictions against gold values.
pub fn r_squared_of(gold: &[f64], pred: &[f64]) -> Result<f64> {
    check_lengths(gold.len(), pred.len(), 2)?;
    let m = gold.iter().sum::<f64>() / gold.len() as f64;
    let tss: f64 = gold.iter().map(|g| (g - m) * (g - m)).sum();
    if tss == 0.0 {
        return Err(Error::UndefinedCorrelation("gold values have zero variance".into()));
    }
    let rss: f64 = gold.iter().zip(pred).map(|(g, p)| (g - p) * (g - p)).sum();
    Ok(1.0 - rss / tss)
}

pub fn accuracy(gold: &[i64], pred: &[i64]) -> Result<f64> {
    check_lengths(gold.len(), pred.len(), 1)?;
    let hits = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Ok(hits as f64 / gold.len() as f64)
}

/// Fenwick tree over ranks, counting inserted elements.
struct Fenwick(Vec<u64>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick(vec![0; n + 1])
    }

    fn add(&mut self, rank: usize) {
        let mut i = rank + 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted ranks < `rank`.
    fn below(&self, rank: usize) -> u64 {
        let mut i = rank;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Number of ordered pairs (i, j), i != j, with (g_i - g_j)(p_i - p_j) > 0.
/// O(n log n).
pub fn concordant_pairs(gold: &[f64], pred: &[f64]) -> Result<u64> {
    check_lengths(gold.len(), pred.len(), 0)?;
    if gold.iter().chain(pred).any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN in TAD input".into()));
    }
    let n = gold.len();
    let mut sorted_pred: Vec<f64> = pred.to_vec();
    sorted_pred.sort_by(f64::total_cmp);
    sorted_pred.dedup();
    let rank = |v: f64| sorted_pred.partition_point(|&x| x < v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| gold[i].total_cmp(&gold[j]));
    let mut tree = Fenwick::new(sorted_pred.len());
    let mut count = 0u64;
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end < n && gold[order[end]] == gold[order[start]] {
            end += 1;
        }
        // pairs with strictly smaller gold and strictly smaller prediction
        for &i in &order[start..end] {
            count += tree.below(rank(pred[i]));
        }
        for &i in &order[start..end] {
            tree.add(rank(pred[i]));
        }
        start = end;
    }
    Ok(2 * count)
}

/// Trend accuracy in direction as a fraction in [0, 1]: concordant ordered
/// pairs over n(n - 1).
pub fn tad(gold: &[f64], pred: &[f64]) -> Result<f64> {
    if gold.len() < 2 {
        return Err(Error::Config("TAD needs at least 2 points".into()));
    }
    let n = gold.len() as u64;
    Ok(concordant_pairs(gold, pred)? as f64 / (n * (n - 1)) as f64)
}
