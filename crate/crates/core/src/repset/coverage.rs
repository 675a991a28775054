//! Ranking-based coverage of a dataset subset: mean win rate, coverage η,
//! coverage curves, SC-AUC, the smallest covering prefix, and comparison
//! against random orderings.

use crate::auc::{anchored_area, anchored_area_prefix};
use crate::benchio::Benchmark;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::repset::discovery::{baseline_order, BaselineKind, SelectionTrace};
use crate::scalar::{pearson, Scalar};

/// Default η a prefix must reach to count as covering the benchmark.
pub const DEFAULT_COVERAGE_THRESHOLD: f64 = 0.95;

/// Per-model, per-dataset fraction of other models strictly beaten.
fn win_fractions<T: Scalar>(scores: &Matrix<T>) -> Result<Matrix<T>> {
    let (m, n) = (scores.rows(), scores.cols());
    if m < 2 {
        return Err(Error::InsufficientData(format!(
            "win rates need at least 2 models, found {m}"
        )));
    }
    if n == 0 {
        return Err(Error::InsufficientData("win rates need at least 1 dataset".into()));
    }
    let others = T::from_count(m - 1);
    let mut out = Matrix::zeros(m, n);
    for d in 0..n {
        for mu in 0..m {
            let v = scores.get(mu, d);
            let wins = (0..m).filter(|&o| v > scores.get(o, d)).count();
            out.set(mu, d, T::from_count(wins) / others);
        }
    }
    Ok(out)
}

/// Mean win rate of every model: for each dataset the fraction of the other
/// `m - 1` models it strictly beats, averaged over datasets. Ties award
/// nothing to either side.
pub fn mean_win_rate<T: Scalar>(scores: &Matrix<T>) -> Result<Vec<T>> {
    let w = win_fractions(scores)?;
    let n = T::from_count(w.cols());
    Ok((0..w.rows())
        .map(|mu| w.row(mu).iter().copied().sum::<T>() / n)
        .collect())
}

/// Precomputed per-dataset win fractions so that η of many subsets of one
/// benchmark can be evaluated in `O(m |S|)` each.
#[derive(Debug, Clone)]
pub struct CoverageEvaluator<T> {
    wins: Matrix<T>,
    full_mwr: Vec<T>,
}

impl<T: Scalar> CoverageEvaluator<T> {
    pub fn new(bench: &Benchmark<T>) -> Result<Self> {
        let wins = win_fractions(&bench.dense()?)?;
        let n = T::from_count(wins.cols());
        let full_mwr = (0..wins.rows())
            .map(|mu| wins.row(mu).iter().copied().sum::<T>() / n)
            .collect();
        Ok(Self { wins, full_mwr })
    }

    pub fn n_datasets(&self) -> usize {
        self.wins.cols()
    }

    pub fn full_mean_win_rate(&self) -> &[T] {
        &self.full_mwr
    }

    fn check_indices(&self, subset: &[usize]) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::InsufficientData("coverage of an empty subset is undefined".into()));
        }
        match subset.iter().find(|&&j| j >= self.n_datasets()) {
            Some(j) => Err(Error::Shape(format!("dataset index {j} is out of range"))),
            None => Ok(()),
        }
    }

    /// η of one subset; `None` when either win-rate vector is constant.
    pub fn coverage(&self, subset: &[usize]) -> Result<Option<T>> {
        self.check_indices(subset)?;
        let k = T::from_count(subset.len());
        let sub: Vec<T> = (0..self.wins.rows())
            .map(|mu| subset.iter().map(|&j| self.wins.get(mu, j)).sum::<T>() / k)
            .collect();
        Ok(pearson(&self.full_mwr, &sub))
    }

    /// η for every prefix of `order`, accumulating win fractions.
    pub fn prefix_coverages(&self, order: &[usize]) -> Result<Vec<Option<T>>> {
        self.check_indices(order)?;
        let m = self.wins.rows();
        let mut sums = vec![T::zero(); m];
        let mut out = Vec::with_capacity(order.len());
        for (k, &j) in order.iter().enumerate() {
            for (mu, s) in sums.iter_mut().enumerate() {
                *s += self.wins.get(mu, j);
            }
            let scale = T::from_count(k + 1);
            let sub: Vec<T> = sums.iter().map(|&s| s / scale).collect();
            out.push(pearson(&self.full_mwr, &sub));
        }
        Ok(out)
    }

    /// Coverage curve for a full-length ordering.
    pub fn curve(&self, trace: &SelectionTrace<T>) -> Result<CoverageCurve<T>> {
        let d = self.n_datasets();
        let mut seen = vec![false; d];
        for &j in &trace.order {
            if j >= d || std::mem::replace(&mut seen[j], true) {
                return Err(Error::Shape(format!(
                    "trace is not a permutation of {d} datasets"
                )));
            }
        }
        if trace.order.len() != d {
            return Err(Error::Shape(format!(
                "coverage curve needs a full ordering of {d} datasets, trace has {}",
                trace.order.len()
            )));
        }
        let raw = self.prefix_coverages(&trace.order)?;
        let undefined_sizes = raw
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_none())
            .map(|(k, _)| k + 1)
            .collect();
        Ok(CoverageCurve {
            etas: raw.into_iter().map(|e| e.unwrap_or_else(T::zero)).collect(),
            undefined_sizes,
            trace: trace.clone(),
        })
    }
}

/// Pearson correlation between full-benchmark mean win rates and those
/// computed from `subset` alone. `Ok(None)` flags an undefined value (a
/// constant win-rate vector); curves record it as 0.
pub fn coverage<T: Scalar>(bench: &Benchmark<T>, subset: &[usize]) -> Result<Option<T>> {
    CoverageEvaluator::new(bench)?.coverage(subset)
}

/// η at every prefix size `1..=d` of a discovery order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve<T> {
    pub etas: Vec<T>,
    /// Prefix sizes whose η was undefined and recorded as 0.
    pub undefined_sizes: Vec<usize>,
    pub trace: SelectionTrace<T>,
}

impl<T: Scalar> CoverageCurve<T> {
    pub fn sc_auc(&self) -> T {
        sc_auc(&self.etas)
    }

    pub fn smallest_covering_prefix(&self, threshold: T) -> usize {
        smallest_covering_prefix(&self.etas, threshold)
    }
}

pub fn coverage_curve<T: Scalar>(
    bench: &Benchmark<T>,
    trace: &SelectionTrace<T>,
) -> Result<CoverageCurve<T>> {
    CoverageEvaluator::new(bench)?.curve(trace)
}

/// Signed area under η against normalized subset size `k / d`, with the
/// first value held back to zero.
pub fn sc_auc<T: Scalar>(etas: &[T]) -> T {
    anchored_area(etas)
}

/// Least prefix size whose η reaches `threshold`; the full length when
/// none does.
pub fn smallest_covering_prefix<T: Scalar>(etas: &[T], threshold: T) -> usize {
    etas.iter()
        .position(|&e| e >= threshold)
        .map_or(etas.len(), |p| p + 1)
}

/// Fractions of random runs that a system matches or beats, on the full
/// SC-AUC and on the area up to its covering prefix (at least two sizes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VersusRandom<T> {
    pub auc_prop: T,
    pub max2_prop: T,
}

pub fn proportion_vs_random<T: Scalar>(
    system: &CoverageCurve<T>,
    random_curves: &[CoverageCurve<T>],
    threshold: T,
) -> VersusRandom<T> {
    if random_curves.is_empty() {
        return VersusRandom {
            auc_prop: T::nan(),
            max2_prop: T::nan(),
        };
    }
    let window = system.smallest_covering_prefix(threshold).max(2);
    let sys_auc = system.sc_auc();
    let sys_window = anchored_area_prefix(&system.etas, window);
    let (mut auc_hits, mut window_hits) = (0usize, 0usize);
    for r in random_curves {
        if r.sc_auc() <= sys_auc {
            auc_hits += 1;
        }
        if anchored_area_prefix(&r.etas, window) <= sys_window {
            window_hits += 1;
        }
    }
    let n = T::from_count(random_curves.len());
    VersusRandom {
        auc_prop: T::from_count(auc_hits) / n,
        max2_prop: T::from_count(window_hits) / n,
    }
}

/// Aggregate of many seeded random orderings.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBaseline<T> {
    pub curves: Vec<CoverageCurve<T>>,
    pub mean_sc_auc: T,
    pub mean_s_star: T,
    /// Pointwise mean η per prefix size.
    pub mean_etas: Vec<T>,
}

/// Runs `runs` random orderings; run `r` uses seed `base_seed + r`.
pub fn random_baseline<T: Scalar>(
    evaluator: &CoverageEvaluator<T>,
    bench: &Benchmark<T>,
    runs: usize,
    base_seed: u64,
    threshold: T,
) -> Result<RandomBaseline<T>> {
    if runs == 0 {
        return Err(Error::Config("random baseline needs at least one run".into()));
    }
    let curves = (0..runs)
        .map(|r| {
            let trace = baseline_order(bench, BaselineKind::Random, base_seed.wrapping_add(r as u64));
            evaluator.curve(&trace)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = T::from_count(runs);
    let d = evaluator.n_datasets();
    let mean_sc_auc = curves.iter().map(CoverageCurve::sc_auc).sum::<T>() / n;
    let mean_s_star = curves
        .iter()
        .map(|c| T::from_count(c.smallest_covering_prefix(threshold)))
        .sum::<T>()
        / n;
    let mean_etas = (0..d)
        .map(|k| curves.iter().map(|c| c.etas[k]).sum::<T>() / n)
        .collect();
    Ok(RandomBaseline {
        curves,
        mean_sc_auc,
        mean_s_star,
        mean_etas,
    })
}
