//! Least squares with an intercept via Householder QR on centered columns.

/// Residual variance below this fraction of a column's own variance marks
/// the column as collinear with the columns before it.
pub const COLLINEARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub intercept: f64,
    /// One slope per input column; dropped columns get 0.
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub tss: f64,
    /// Input columns found collinear with earlier columns (or constant).
    pub dropped: Vec<usize>,
}

impl LeastSquares {
    pub fn n(&self) -> usize {
        self.residuals.len()
    }

    /// Number of slopes actually estimated.
    pub fn rank(&self) -> usize {
        self.beta.len() - self.dropped.len()
    }

    pub fn r_squared(&self) -> f64 {
        if self.tss > 0.0 {
            1.0 - self.rss / self.tss
        } else {
            // constant response: nothing to explain
            1.0
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Fits y = a + Σ b_j x_j. Collinear columns are always reported in
/// `dropped`; callers decide whether that is an error.
pub fn least_squares(columns: &[&[f64]], y: &[f64]) -> LeastSquares {
    let n = y.len();
    let p = columns.len();
    debug_assert!(columns.iter().all(|c| c.len() == n));
    let y_mean = mean(y);
    let means: Vec<f64> = columns.iter().map(|c| mean(c)).collect();
    let mut a: Vec<Vec<f64>> = columns
        .iter()
        .zip(&means)
        .map(|(c, m)| c.iter().map(|x| x - m).collect())
        .collect();
    let own_ss: Vec<f64> = a.iter().map(|c| c.iter().map(|x| x * x).sum()).collect();
    let mut z: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let tss: f64 = z.iter().map(|v| v * v).sum();

    let mut kept: Vec<usize> = Vec::with_capacity(p);
    let mut dropped = Vec::new();
    // r[row][col-slot] for kept columns, upper triangular
    let mut r_cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    for j in 0..p {
        let row = kept.len();
        let tail_ss: f64 = a[j][row..].iter().map(|x| x * x).sum();
        if row >= n || own_ss[j] == 0.0 || tail_ss < COLLINEARITY_TOL * own_ss[j] {
            dropped.push(j);
            continue;
        }
        let norm = tail_ss.sqrt();
        let alpha = if a[j][row] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][row..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let s = 2.0 * dot / vv;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= s * vi;
            }
        };
        for col in a.iter_mut().skip(j + 1) {
            reflect(&mut col[row..]);
        }
        reflect(&mut z[row..]);
        let mut rc = a[j][..row].to_vec();
        rc.push(alpha);
        r_cols.push(rc);
        kept.push(j);
    }

    // back substitution R b = z[..rank]
    let rank = kept.len();
    let mut b = vec![0.0; rank];
    for i in (0..rank).rev() {
        let mut s = z[i];
        for k in i + 1..rank {
            s -= r_cols[k][i] * b[k];
        }
        b[i] = s / r_cols[i][i];
    }
    let mut beta = vec![0.0; p];
    for (slot, &j) in kept.iter().enumerate() {
        beta[j] = b[slot];
    }
    let intercept = y_mean - beta.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();
    let residuals: Vec<f64> = (0..n)
        .map(|i| {
            let fit = intercept + columns.iter().zip(&beta).map(|(c, b)| b * c[i]).sum::<f64>();
            y[i] - fit
        })
        .collect();
    let rss = residuals.iter().map(|e| e * e).sum();
    LeastSquares {
        intercept,
        beta,
        residuals,
        rss,
        tss,
        dropped,
    }
}
