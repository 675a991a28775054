//! Pairwise relationship census.
//!
//! Every pair of columns (datasets) or rows (models) is classified as
//! linear, exponential, power-law or none by fitting six single-feature
//! least-squares regressions (three families, both directions) and keeping
//! the one with the largest R². R² for the log families is measured in the
//! transformed space. Log transforms use `ln(v + LOG_OFFSET)` so exact zeros
//! stay finite.

use std::collections::BTreeMap;
use std::fmt;

use crate::benchio::Benchmark;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Offset added before every log transform.
pub const LOG_OFFSET: f64 = 1e-6;

/// Default R² below which a pair is classified as having no relationship.
pub const DEFAULT_R2_THRESHOLD: f64 = 0.5;

/// Fewest paired observations for which a fit is attempted.
pub const MIN_COMMON_OBSERVATIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Linear,
    Exponential,
    PowerLaw,
}

impl Family {
    /// Precedence order used to break exact R² ties.
    pub const ALL: [Family; 3] = [Family::Linear, Family::Exponential, Family::PowerLaw];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationshipClass {
    Linear,
    Exponential,
    PowerLaw,
    None,
}

impl RelationshipClass {
    pub const ALL: [RelationshipClass; 4] = [
        RelationshipClass::Linear,
        RelationshipClass::Exponential,
        RelationshipClass::PowerLaw,
        RelationshipClass::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationshipClass::Linear => "LINEAR",
            RelationshipClass::Exponential => "EXPONENTIAL",
            RelationshipClass::PowerLaw => "POWER_LAW",
            RelationshipClass::None => "NONE",
        }
    }
}

impl From<Family> for RelationshipClass {
    fn from(f: Family) -> Self {
        match f {
            Family::Linear => RelationshipClass::Linear,
            Family::Exponential => RelationshipClass::Exponential,
            Family::PowerLaw => RelationshipClass::PowerLaw,
        }
    }
}

impl fmt::Display for RelationshipClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which side of the pair is the predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// The first vector predicts the second.
    Forward,
    /// The second vector predicts the first.
    Backward,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::Forward => "i->j",
            Direction::Backward => "j->i",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult<T> {
    pub family: Family,
    pub direction: Direction,
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationshipVerdict<T> {
    pub klass: RelationshipClass,
    pub best_fit: Option<FitResult<T>>,
    pub n_common: usize,
    /// Set when no regression could be fitted for the pair.
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Datasets,
    Models,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Datasets => "datasets",
            Axis::Models => "models",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationshipCensus<T> {
    pub axis: Axis,
    pub counts: BTreeMap<RelationshipClass, usize>,
    /// Keyed by the unordered index pair `(a, b)` with `a < b`.
    pub verdicts: BTreeMap<(usize, usize), RelationshipVerdict<T>>,
}

impl<T> RelationshipCensus<T> {
    pub fn count(&self, klass: RelationshipClass) -> usize {
        self.counts.get(&klass).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

fn log_transform<T: Scalar>(v: &[T], role: &str) -> Result<Vec<T>> {
    let eps = T::lit(LOG_OFFSET);
    v.iter()
        .map(|&x| {
            let shifted = x + eps;
            if shifted > T::zero() {
                Ok(shifted.ln())
            } else {
                Err(Error::InsufficientData(format!(
                    "{role} value {x} is outside the log domain"
                )))
            }
        })
        .collect()
}

/// Simple least squares of `y` on `x` with intercept. R² is computed as
/// `Sxy² / (Sxx Syy)`, which equals `1 - SSres/SStot` for this model and is
/// exactly symmetric in the two arguments.
fn ols<T: Scalar>(x: &[T], y: &[T]) -> Result<(T, T, T)> {
    let n = T::from_count(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxx += da * da;
        syy += db * db;
        sxy += da * db;
    }
    if !(sxx > T::zero()) {
        return Err(Error::DegenerateFit("predictor has zero variance".into()));
    }
    if !(syy > T::zero()) {
        return Err(Error::DegenerateFit("target has zero variance".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = ((sxy * sxy) / (sxx * syy)).min(T::one());
    Ok((slope, intercept, r2))
}

/// Fits one regression family with `x` as predictor and `y` as target.
///
/// * linear: `y ~ a x + b`
/// * exponential: `ln(y + eps) ~ a x + b`
/// * power law: `ln(y + eps) ~ a ln(x + eps) + b`
///
/// The returned fit is labelled [`Direction::Forward`].
pub fn fit_pair_regression<T: Scalar>(x: &[T], y: &[T], family: Family) -> Result<FitResult<T>> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "paired vectors differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < MIN_COMMON_OBSERVATIONS {
        return Err(Error::InsufficientData(format!(
            "{} common observations, at least {MIN_COMMON_OBSERVATIONS} required",
            x.len()
        )));
    }
    let (slope, intercept, r_squared) = match family {
        Family::Linear => ols(x, y)?,
        Family::Exponential => ols(x, &log_transform(y, "target")?)?,
        Family::PowerLaw => ols(&log_transform(x, "predictor")?, &log_transform(y, "target")?)?,
    };
    Ok(FitResult {
        family,
        direction: Direction::Forward,
        slope,
        intercept,
        r_squared,
    })
}

/// Best-of-six classification of a pair of vectors.
///
/// Infeasible fits are skipped. The class is `None` when nothing could be
/// fitted or the best R² is below `threshold`. Exact ties are broken by
/// family precedence (linear, exponential, power law), then forward
/// direction first.
pub fn classify_relationship<T: Scalar>(x: &[T], y: &[T], threshold: T) -> RelationshipVerdict<T> {
    let mut best: Option<FitResult<T>> = None;
    let mut last_error = None;
    for family in Family::ALL {
        for direction in [Direction::Forward, Direction::Backward] {
            let fit = match direction {
                Direction::Forward => fit_pair_regression(x, y, family),
                Direction::Backward => fit_pair_regression(y, x, family),
            };
            match fit {
                Ok(mut f) => {
                    f.direction = direction;
                    if best.is_none_or(|b| f.r_squared > b.r_squared) {
                        best = Some(f);
                    }
                }
                Err(e) => last_error = Some(e),
            }
        }
    }
    let klass = match &best {
        Some(f) if f.r_squared >= threshold => f.family.into(),
        _ => RelationshipClass::None,
    };
    RelationshipVerdict {
        klass,
        diagnostic: if best.is_none() {
            last_error.map(|e| e.to_string())
        } else {
            None
        },
        best_fit: best,
        n_common: x.len().min(y.len()),
    }
}

fn pairwise_complete<T: Scalar>(a: &[Option<T>], b: &[Option<T>]) -> (Vec<T>, Vec<T>) {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .unzip()
}

fn census<T: Scalar>(
    axis: Axis,
    vectors: &[Vec<Option<T>>],
    threshold: T,
) -> Result<RelationshipCensus<T>> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "census over {} needs at least 2 entries, found {n}",
            axis.name()
        )));
    }
    let mut counts: BTreeMap<RelationshipClass, usize> =
        RelationshipClass::ALL.iter().map(|&k| (k, 0)).collect();
    let mut verdicts = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            let (x, y) = pairwise_complete(&vectors[a], &vectors[b]);
            let verdict = classify_relationship(&x, &y, threshold);
            *counts.entry(verdict.klass).or_default() += 1;
            verdicts.insert((a, b), verdict);
        }
    }
    Ok(RelationshipCensus {
        axis,
        counts,
        verdicts,
    })
}

/// Classifies every unordered pair of dataset columns over the models that
/// observed both.
pub fn compare_all_datasets<T: Scalar>(
    bench: &Benchmark<T>,
    threshold: T,
) -> Result<RelationshipCensus<T>> {
    let columns: Vec<_> = (0..bench.n_datasets()).map(|j| bench.column(j)).collect();
    census(Axis::Datasets, &columns, threshold)
}

/// Classifies every unordered pair of model rows over the datasets both
/// were scored on.
pub fn compare_all_models<T: Scalar>(
    bench: &Benchmark<T>,
    threshold: T,
) -> Result<RelationshipCensus<T>> {
    let rows: Vec<_> = (0..bench.n_models()).map(|i| bench.row(i).to_vec()).collect();
    census(Axis::Models, &rows, threshold)
}
