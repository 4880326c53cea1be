#![allow(dead_code)]

use std::path::{Path, PathBuf};

use readgrade_core::corpus::tokenize;
use readgrade_core::{Document, ParseTree, TokenizerConfig};

/// The core crate's directory; this module is also compiled into tests of
/// sibling crates.
fn core_dir() -> PathBuf {
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    if here.join("tests/fixtures").is_dir() {
        here.to_path_buf()
    } else {
        here.join("../core")
    }
}

pub fn fixture(name: &str) -> PathBuf {
    core_dir().join("tests/fixtures").join(name)
}

pub fn data(name: &str) -> PathBuf {
    core_dir().join("data").join(name)
}

pub fn doc(text: &str) -> Document {
    tokenize("t", text, &TokenizerConfig::default()).unwrap()
}

/// A hand-counted fixture tree.
pub struct CountedTree {
    pub tree: ParseTree,
    pub height: usize,
    pub np: usize,
    pub vp: usize,
    pub sbar: usize,
    pub pp: usize,
    pub internal: usize,
    pub terminals: usize,
}

pub fn counted_trees() -> Vec<CountedTree> {
    std::fs::read_to_string(fixture("parsing_trees.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            let n = |i: usize| f[i].parse::<usize>().unwrap();
            CountedTree {
                tree: ParseTree::parse(f[0]).unwrap(),
                height: n(1),
                np: n(2),
                vp: n(3),
                sbar: n(4),
                pp: n(5),
                internal: n(6),
                terminals: n(7),
            }
        })
        .collect()
}

/// (XᵀX)⁻¹Xᵀy with a leading intercept column, solved by nalgebra's LU.
pub fn normal_equations(columns: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let x = nalgebra::DMatrix::from_fn(n, columns.len() + 1, |i, j| if j == 0 { 1.0 } else { columns[j - 1][i] });
    let xt = x.transpose();
    let xtx = &xt * &x;
    let xty = &xt * nalgebra::DVector::from_column_slice(y);
    xtx.lu().solve(&xty).expect("nonsingular design").iter().copied().collect()
}

/// Ordered pairs i≠j with (gᵢ−gⱼ)(pᵢ−pⱼ) > 0, counted directly.
pub fn brute_concordant(gold: &[f64], pred: &[f64]) -> u64 {
    let mut c = 0;
    for i in 0..gold.len() {
        for j in 0..gold.len() {
            if i != j && (gold[i] - gold[j]) * (pred[i] - pred[j]) > 0.0 {
                c += 1;
            }
        }
    }
    c
}

pub fn brute_tad(gold: &[f64], pred: &[f64]) -> f64 {
    let n = gold.len() as f64;
    brute_concordant(gold, pred) as f64 / (n * (n - 1.0))
}

/// Subset (as column indices) with the lowest BIC over all 2^K non-empty
/// subsets. Each subset is solved from its block of the Gram matrix
/// [1 X]ᵀ[1 X]; RSS = yᵀy − bᵀ[1 X]ᵀy. Ties go to fewer features.
pub fn exhaustive_bic(columns: &[Vec<f64>], y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let p = columns.len() + 1;
    let col = |j: usize, i: usize| if j == 0 { 1.0 } else { columns[j - 1][i] };
    let gram = nalgebra::DMatrix::from_fn(p, p, |a, b| (0..n).map(|i| col(a, i) * col(b, i)).sum::<f64>());
    let xty = nalgebra::DVector::from_fn(p, |a, _| (0..n).map(|i| col(a, i) * y[i]).sum::<f64>());
    let yty: f64 = y.iter().map(|v| v * v).sum();
    let nf = n as f64;
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for mask in 1u32..(1 << columns.len()) {
        let idx: Vec<usize> = (0..columns.len()).filter(|j| mask & (1 << j) != 0).collect();
        let rows: Vec<usize> = std::iter::once(0).chain(idx.iter().map(|j| j + 1)).collect();
        let g = nalgebra::DMatrix::from_fn(rows.len(), rows.len(), |a, b| gram[(rows[a], rows[b])]);
        let v = nalgebra::DVector::from_fn(rows.len(), |a, _| xty[rows[a]]);
        let b = g.lu().solve(&v).expect("nonsingular design");
        let rss = yty - b.dot(&v);
        let bic = nf * (rss / nf).ln() + nf.ln() * idx.len() as f64;
        let better = match &best {
            None => true,
            Some((bb, bk, _)) => bic < *bb || (bic == *bb && idx.len() < *bk),
        };
        if better {
            best = Some((bic, idx.len(), idx));
        }
    }
    best.unwrap().2
}

/// One-sample Kolmogorov–Smirnov statistic against Uniform(0,1).
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &u)| ((i as f64 + 1.0) / n - u).max(u - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at α = 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
