#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simba_core::{Benchmark, Matrix, SimilarityMatrix, Measure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense `m × d` benchmark with independent uniform scores.
pub fn random_bench(m: usize, d: usize, seed: u64) -> Benchmark<f64> {
    let mut r = rng(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..d).map(|_| r.random_range(0.0..1.0)).collect())
        .collect();
    Benchmark::from_rows(&rows).unwrap()
}

/// Symmetric similarity matrix with unit diagonal and off-diagonal values
/// uniform in `[0, 1)`.
pub fn random_similarity(d: usize, seed: u64) -> SimilarityMatrix<f64> {
    let mut r = rng(seed);
    let mut rows = vec![vec![1.0; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let v = r.random_range(0.0..1.0);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    SimilarityMatrix::from_values(Measure::Pearson, &rows).unwrap()
}

/// Columns fall into `k` clusters of `per_cluster` near-duplicates. Each
/// cluster has its own level, spread and shape so that both rank-based and
/// distribution-based measures separate them. Returns the benchmark and the
/// cluster of every column.
pub fn planted_clusters(k: usize, per_cluster: usize, m: usize, seed: u64) -> (Benchmark<f64>, Vec<usize>) {
    let mut r = rng(seed);
    let bases: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            let level = 0.05 + 0.6 * c as f64 / k as f64;
            let spread = 0.15 + 0.2 * ((c * 7) % k) as f64 / k as f64;
            let shape = 0.5 + 1.5 * ((c * 3) % k) as f64 / k as f64;
            (0..m)
                .map(|_| level + spread * r.random_range(0.0f64..1.0).powf(shape))
                .collect()
        })
        .collect();
    let mut labels: Vec<usize> = (0..k * per_cluster).map(|j| j % k).collect();
    // deterministic interleaving so clusters are not index-contiguous
    let shift = seed as usize % labels.len().max(1);
    labels.rotate_left(shift);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            labels
                .iter()
                .map(|&c| (bases[c][i] + r.random_range(-0.004..0.004)).clamp(0.0, 1.0))
                .collect()
        })
        .collect();
    (Benchmark::from_rows(&rows).unwrap(), labels)
}

/// Rank-one benchmark: every column is an affine function of one latent
/// model ability, so any single column predicts the rest exactly.
pub fn planted_linear(m: usize, d: usize, seed: u64) -> Benchmark<f64> {
    let mut r = rng(seed);
    let ability: Vec<f64> = (0..m).map(|_| r.random_range(0.0..1.0)).collect();
    let coefs: Vec<(f64, f64)> = (0..d)
        .map(|_| (r.random_range(0.05..0.3), r.random_range(0.3..0.6)))
        .collect();
    let rows: Vec<Vec<f64>> = ability
        .iter()
        .map(|&u| coefs.iter().map(|&(a, b)| a + b * u).collect())
        .collect();
    Benchmark::from_rows(&rows).unwrap()
}

pub fn dense(b: &Benchmark<f64>) -> Matrix<f64> {
    b.dense().unwrap()
}

/// Textbook proxy coverage straight from the definition.
pub fn brute_delta(subset: &[usize], sim: &SimilarityMatrix<f64>) -> f64 {
    if subset.is_empty() {
        return 0.0;
    }
    let d = sim.dim();
    let total: f64 = (0..d)
        .map(|k| {
            if subset.contains(&k) {
                1.0
            } else {
                subset.iter().map(|&s| sim.get(k, s)).fold(f64::NEG_INFINITY, f64::max)
            }
        })
        .sum();
    total / d as f64
}

/// Mean win rate by direct pairwise counting.
pub fn brute_mwr(scores: &Matrix<f64>, cols: &[usize]) -> Vec<f64> {
    let m = scores.rows();
    (0..m)
        .map(|a| {
            let mut acc = 0.0;
            for &j in cols {
                let mut wins = 0.0;
                for b in 0..m {
                    if b != a && scores.get(a, j) > scores.get(b, j) {
                        wins += 1.0;
                    }
                }
                acc += wins / (m - 1) as f64;
            }
            acc / cols.len() as f64
        })
        .collect()
}

/// Two-pass Pearson correlation.
pub fn brute_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some(sxy / (sxx * syy).sqrt())
    }
}

/// All subsets of `0..d` with exactly `k` members, in lexicographic order.
pub fn combinations(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            go(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, d, k, &mut Vec::new(), &mut out);
    out
}
