//! Dataset-to-dataset similarity measures and the d×d similarity matrix.
//!
//! Correlations (Pearson, Spearman, Kendall) stay signed in `[-1, 1]`.
//! Distances are mapped into `(0, 1]`: Lp distances via `exp(-dist)`,
//! Wasserstein via `exp(-W1 / max W1)` over all column pairs, and
//! Jensen-Shannon via `1 - sqrt(JSD)` with the divergence in bits.

use std::fmt;
use std::str::FromStr;

use crate::benchio::Benchmark;
use crate::error::{Error, Result};
use crate::scalar::{pearson, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Pearson,
    Spearman,
    KendallTau,
    Cosine,
    Manhattan,
    Euclidean,
    MinkowskiP3,
    Wasserstein,
    JensenShannon,
}

impl Measure {
    pub const ALL: [Measure; 9] = [
        Measure::Pearson,
        Measure::Spearman,
        Measure::KendallTau,
        Measure::Cosine,
        Measure::Manhattan,
        Measure::Euclidean,
        Measure::MinkowskiP3,
        Measure::Wasserstein,
        Measure::JensenShannon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Pearson => "pearson",
            Measure::Spearman => "spearman",
            Measure::KendallTau => "kendall_tau",
            Measure::Cosine => "cosine",
            Measure::Manhattan => "manhattan",
            Measure::Euclidean => "euclidean",
            Measure::MinkowskiP3 => "minkowski_p3",
            Measure::Wasserstein => "wasserstein",
            Measure::JensenShannon => "jensen_shannon",
        }
    }

    pub fn is_correlation(self) -> bool {
        matches!(self, Measure::Pearson | Measure::Spearman | Measure::KendallTau)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .or(match key.as_str() {
                "kendall" => Some(Measure::KendallTau),
                "minkowski" | "l3" => Some(Measure::MinkowskiP3),
                "l1" => Some(Measure::Manhattan),
                "l2" => Some(Measure::Euclidean),
                "js" => Some(Measure::JensenShannon),
                _ => None,
            })
            .ok_or_else(|| Error::Config(format!("unknown similarity measure `{s}`")))
    }
}

/// Why a similarity value was substituted rather than computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityFlag {
    /// A correlation over a constant vector; reported as 0.
    ZeroVariance,
    /// Cosine with a zero vector, or Kendall with no untied pairs; reported as 0.
    ZeroNorm,
    /// Fewer than two commonly observed models; reported as 0.
    InsufficientOverlap,
    /// A zero-sum column replaced by the uniform distribution (Jensen-Shannon).
    UniformSubstituted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity<T> {
    pub value: T,
    pub flag: Option<SimilarityFlag>,
}

impl<T> Similarity<T> {
    fn exact(value: T) -> Self {
        Self { value, flag: None }
    }

    fn flagged(value: T, flag: SimilarityFlag) -> Self {
        Self {
            value,
            flag: Some(flag),
        }
    }
}

/// Fractional ranks (1-based), ties receive the mean of their positions.
pub fn average_ranks<T: Scalar>(v: &[T]) -> Vec<T> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("finite scores"));
    let mut ranks = vec![T::zero(); v.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && v[idx[end]] == v[idx[start]] {
            end += 1;
        }
        // positions start..end share rank (start+1 + end) / 2
        let rank = T::from_count(start + 1 + end) / T::lit(2.0);
        for &i in &idx[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// `(C - D) / (C + D)` over all index pairs; pairs tied in either vector
/// count toward neither.
pub fn kendall_concordance<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    let (mut concordant, mut discordant) = (0usize, 0usize);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let s = (x[i] - x[j]) * (y[i] - y[j]);
            if s > T::zero() {
                concordant += 1;
            } else if s < T::zero() {
                discordant += 1;
            }
        }
    }
    let total = concordant + discordant;
    (total > 0).then(|| {
        (T::from_count(concordant) - T::from_count(discordant)) / T::from_count(total)
    })
}

/// Lp distance for `p` in {1, 2, 3}.
pub fn lp_distance<T: Scalar>(x: &[T], y: &[T], p: u32) -> T {
    let sum: T = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| (a - b).abs().powi(p as i32))
        .sum();
    match p {
        1 => sum,
        2 => sum.sqrt(),
        _ => sum.powf(T::one() / T::from_count(p as usize)),
    }
}

/// First Wasserstein distance between two equal-size empirical samples:
/// the mean absolute difference of the sorted samples.
pub fn wasserstein_1d<T: Scalar>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    if x.is_empty() {
        return T::zero();
    }
    let sorted = |v: &[T]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
        s
    };
    let (sx, sy) = (sorted(x), sorted(y));
    sx.iter().zip(&sy).map(|(&a, &b)| (a - b).abs()).sum::<T>() / T::from_count(x.len())
}

fn to_distribution<T: Scalar>(v: &[T]) -> (Vec<T>, bool) {
    let total: T = v.iter().copied().sum();
    if total > T::zero() {
        (v.iter().map(|&x| x / total).collect(), false)
    } else {
        let u = T::one() / T::from_count(v.len());
        (vec![u; v.len()], true)
    }
}

/// Jensen-Shannon divergence in bits (natural-log divergence divided by
/// ln 2), so the result lies in `[0, 1]`. Inputs are normalized to sum to
/// one; a zero-sum input is replaced by the uniform distribution.
pub fn jensen_shannon_divergence<T: Scalar>(x: &[T], y: &[T]) -> (T, bool) {
    let (p, up) = to_distribution(x);
    let (q, uq) = to_distribution(y);
    let half = T::lit(0.5);
    let kl_to_mid = |a: &[T], b: &[T]| -> T {
        a.iter()
            .zip(b)
            .filter(|(&ai, _)| ai > T::zero())
            .map(|(&ai, &bi)| ai * (ai / (half * (ai + bi))).ln())
            .sum()
    };
    let js = half * (kl_to_mid(&p, &q) + kl_to_mid(&q, &p)) / T::lit(std::f64::consts::LN_2);
    (js.max(T::zero()).min(T::one()), up || uq)
}

/// Similarity of two equal-length column vectors under `measure`.
///
/// `max_wasserstein` is the largest pairwise W1 over the benchmark and is
/// required for [`Measure::Wasserstein`]; a zero normalizer maps every pair
/// to similarity 1.
pub fn column_similarity<T: Scalar>(
    x: &[T],
    y: &[T],
    measure: Measure,
    max_wasserstein: Option<T>,
) -> Result<Similarity<T>> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "columns differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Ok(Similarity::flagged(T::zero(), SimilarityFlag::InsufficientOverlap));
    }
    let sim = match measure {
        Measure::Pearson => correlation_or_zero(pearson(x, y)),
        Measure::Spearman => correlation_or_zero(pearson(&average_ranks(x), &average_ranks(y))),
        Measure::KendallTau => {
            let constant = |v: &[T]| v.iter().all(|&a| a == v[0]);
            if constant(x) || constant(y) {
                Similarity::flagged(T::zero(), SimilarityFlag::ZeroVariance)
            } else {
                match kendall_concordance(x, y) {
                    Some(t) => Similarity::exact(t),
                    None => Similarity::flagged(T::zero(), SimilarityFlag::ZeroNorm),
                }
            }
        }
        Measure::Cosine => {
            let dot: T = x.iter().zip(y).map(|(&a, &b)| a * b).sum();
            let nx = x.iter().map(|&a| a * a).sum::<T>().sqrt();
            let ny = y.iter().map(|&b| b * b).sum::<T>().sqrt();
            if nx > T::zero() && ny > T::zero() {
                Similarity::exact((dot / (nx * ny)).max(-T::one()).min(T::one()))
            } else {
                Similarity::flagged(T::zero(), SimilarityFlag::ZeroNorm)
            }
        }
        Measure::Manhattan => Similarity::exact((-lp_distance(x, y, 1)).exp()),
        Measure::Euclidean => Similarity::exact((-lp_distance(x, y, 2)).exp()),
        Measure::MinkowskiP3 => Similarity::exact((-lp_distance(x, y, 3)).exp()),
        Measure::Wasserstein => {
            let norm = max_wasserstein.ok_or_else(|| {
                Error::Config("wasserstein similarity requires the benchmark-wide max W1".into())
            })?;
            let w = wasserstein_1d(x, y);
            if norm > T::zero() {
                Similarity::exact((-(w / norm)).exp())
            } else {
                Similarity::exact(T::one())
            }
        }
        Measure::JensenShannon => {
            let (js, uniform) = jensen_shannon_divergence(x, y);
            let v = T::one() - js.sqrt();
            if uniform {
                Similarity::flagged(v, SimilarityFlag::UniformSubstituted)
            } else {
                Similarity::exact(v)
            }
        }
    };
    Ok(sim)
}

fn correlation_or_zero<T: Scalar>(r: Option<T>) -> Similarity<T> {
    match r {
        Some(r) => Similarity::exact(r),
        None => Similarity::flagged(T::zero(), SimilarityFlag::ZeroVariance),
    }
}

/// One flagged off-diagonal entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityDiagnostic {
    pub i: usize,
    pub j: usize,
    pub flag: SimilarityFlag,
}

/// Symmetric d×d similarity matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<T> {
    measure: Measure,
    dim: usize,
    values: Vec<T>,
    pub diagnostics: Vec<SimilarityDiagnostic>,
}

impl<T: Scalar> SimilarityMatrix<T> {
    /// Builds a matrix from explicit values; checks shape, symmetry, unit
    /// diagonal and that no entry exceeds one.
    pub fn from_values(measure: Measure, rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("similarity matrix must be square".into()));
        }
        let tol = T::lit(1e-12);
        for i in 0..dim {
            if (rows[i][i] - T::one()).abs() > tol {
                return Err(Error::Schema(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..dim {
                let v = rows[i][j];
                if !v.is_finite() || v > T::one() + tol || (v - rows[j][i]).abs() > tol {
                    return Err(Error::Schema(format!(
                        "entry ({i}, {j}) = {v} breaks symmetry or exceeds 1"
                    )));
                }
            }
        }
        Ok(Self {
            measure,
            dim,
            values: rows.concat(),
            diagnostics: Vec::new(),
        })
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }
}

fn common_pair<T: Scalar>(a: &[Option<T>], b: &[Option<T>]) -> (Vec<T>, Vec<T>) {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .unzip()
}

/// Largest pairwise W1 between dataset columns, over commonly observed models.
pub fn max_pairwise_wasserstein<T: Scalar>(bench: &Benchmark<T>) -> T {
    let cols: Vec<_> = (0..bench.n_datasets()).map(|j| bench.column(j)).collect();
    let mut max = T::zero();
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let (x, y) = common_pair(&cols[i], &cols[j]);
            max = max.max(wasserstein_1d(&x, &y));
        }
    }
    max
}

/// Similarity between every pair of dataset columns.
pub fn similarity_matrix<T: Scalar>(
    bench: &Benchmark<T>,
    measure: Measure,
) -> Result<SimilarityMatrix<T>> {
    let d = bench.n_datasets();
    if d < 2 {
        return Err(Error::InsufficientData(format!(
            "similarity matrix needs at least 2 datasets, found {d}"
        )));
    }
    let context = (measure == Measure::Wasserstein).then(|| max_pairwise_wasserstein(bench));
    let cols: Vec<_> = (0..d).map(|j| bench.column(j)).collect();
    let mut values = vec![T::zero(); d * d];
    let mut diagnostics = Vec::new();
    for i in 0..d {
        values[i * d + i] = T::one();
        for j in i + 1..d {
            let (x, y) = common_pair(&cols[i], &cols[j]);
            let s = column_similarity(&x, &y, measure, context)?;
            if let Some(flag) = s.flag {
                diagnostics.push(SimilarityDiagnostic { i, j, flag });
            }
            values[i * d + j] = s.value;
            values[j * d + i] = s.value;
        }
    }
    Ok(SimilarityMatrix {
        measure,
        dim: d,
        values,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_columns_have_unit_similarity() {
        let x = [0.2, 0.5, 0.9, 0.1];
        let w = wasserstein_1d(&x, &[0.0, 0.3, 0.4, 0.2]);
        for m in Measure::ALL {
            let s = column_similarity(&x, &x, m, Some(w)).unwrap();
            assert!((s.value - 1.0f64).abs() < 1e-12, "{m}: {}", s.value);
        }
    }

    #[test]
    fn reversed_vector_has_pearson_minus_one() {
        let s = column_similarity(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0], Measure::Pearson, None).unwrap();
        assert!((s.value + 1.0f64).abs() < 1e-12);
    }

    #[test]
    fn manhattan_offset_example() {
        let x = [0.3, 0.6];
        let y = [0.4, 0.7];
        let s = column_similarity(&x, &y, Measure::Manhattan, None).unwrap();
        assert!((s.value - (-0.2f64).exp()).abs() < 1e-12);
        assert!((s.value - 0.818_730_753_077_981_8).abs() < 1e-12);
    }

    #[test]
    fn kendall_excludes_ties_from_denominator() {
        // pairs: (0,1) concordant, (0,2) tie in x, (1,2) discordant -> (1 - 1) / 2
        let t = kendall_concordance(&[1.0f64, 2.0, 1.0], &[1.0, 3.0, 4.0]).unwrap();
        assert_eq!(t, 0.0);
        let t = kendall_concordance(&[1.0f64, 2.0, 3.0, 3.0], &[1.0, 2.0, 3.0, 5.0]).unwrap();
        assert_eq!(t, 1.0);
    }

    #[test]
    fn average_ranks_share_ties() {
        assert_eq!(average_ranks(&[10.0f64, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn zero_variance_correlation_is_flagged_zero() {
        let s = column_similarity(&[0.5, 0.5, 0.5], &[0.1, 0.2, 0.3], Measure::Spearman, None).unwrap();
        assert_eq!(s, Similarity::flagged(0.0f64, SimilarityFlag::ZeroVariance));
        let s = column_similarity(&[0.5, 0.5, 0.5], &[0.1, 0.2, 0.3], Measure::KendallTau, None).unwrap();
        assert_eq!(s.flag, Some(SimilarityFlag::ZeroVariance));
    }

    #[test]
    fn zero_vector_cosine_is_flagged_zero() {
        let s = column_similarity(&[0.0, 0.0], &[0.1, 0.2], Measure::Cosine, None).unwrap();
        assert_eq!(s, Similarity::flagged(0.0f64, SimilarityFlag::ZeroNorm));
    }

    #[test]
    fn wasserstein_requires_context() {
        assert!(column_similarity(&[0.1, 0.2], &[0.3, 0.1], Measure::Wasserstein, None).is_err());
    }

    #[test]
    fn jensen_shannon_disjoint_supports_is_zero_similarity() {
        let (js, _) = jensen_shannon_divergence(&[1.0f64, 0.0], &[0.0, 1.0]);
        assert!((js - 1.0).abs() < 1e-12);
        let s = column_similarity(&[1.0f64, 0.0], &[0.0, 1.0], Measure::JensenShannon, None).unwrap();
        assert!(s.value.abs() < 1e-7);
    }

    #[test]
    fn jensen_shannon_zero_column_uses_uniform() {
        let s = column_similarity(&[0.0, 0.0], &[0.5, 0.5], Measure::JensenShannon, None).unwrap();
        assert_eq!(s.flag, Some(SimilarityFlag::UniformSubstituted));
        assert!((s.value - 1.0f64).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_is_mean_sorted_difference() {
        // sorted: [0.1, 0.5, 0.9] vs [0.2, 0.2, 0.6] -> (0.1 + 0.3 + 0.3) / 3
        let w = wasserstein_1d(&[0.9, 0.1, 0.5], &[0.2, 0.6, 0.2]);
        assert!((w - 0.7f64 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_of_identical_columns_is_all_ones() {
        let rows: Vec<Vec<f64>> = [0.1, 0.7, 0.4].iter().map(|&v| vec![v; 3]).collect();
        let b = Benchmark::from_rows(&rows).unwrap();
        for m in Measure::ALL {
            let s = similarity_matrix(&b, m).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((s.get(i, j) - 1.0).abs() < 1e-12, "{m}");
                }
            }
        }
    }

    #[test]
    fn two_dataset_matrix_is_symmetric() {
        let b = Benchmark::from_rows(&[vec![0.1, 0.3], vec![0.6, 0.2], vec![0.4, 0.9]]).unwrap();
        let s = similarity_matrix(&b, Measure::Euclidean).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.get(0, 1), s.get(1, 0));
        assert_eq!(s.get(0, 0), 1.0);
        // max-W1 pair normalizes to exp(-1)
        let w = similarity_matrix(&b, Measure::Wasserstein).unwrap();
        assert!((w.get(0, 1) - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn from_values_validates() {
        assert!(SimilarityMatrix::from_values(Measure::Cosine, &[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(SimilarityMatrix::from_values(Measure::Cosine, &[vec![1.0, 0.5], vec![0.5, 1.0]]).is_ok());
    }

    #[test]
    fn measure_names_round_trip() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert_eq!("Kendall-Tau".parse::<Measure>().unwrap(), Measure::KendallTau);
        assert!("bogus".parse::<Measure>().is_err());
    }
}
