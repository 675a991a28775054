//! Loading, validation, normalization, splitting and perturbation of
//! model × dataset score matrices.
//!
//! Scores are stored row-major (one row per model) with `None` marking a
//! missing cell. Pairwise statistics work over commonly observed rows;
//! anything that needs a dense matrix goes through [`Benchmark::dense`],
//! which fails with the list of offending cells.

use std::collections::{HashMap, HashSet};
use std::io::Read;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::seeded_rng;

/// Score table as loaded, in raw metric units, plus the per-dataset
/// random-chance level.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBenchmark<T> {
    model_ids: Vec<String>,
    dataset_ids: Vec<String>,
    scores: Vec<Option<T>>,
    chance_levels: Vec<T>,
}

/// Normalized score matrix with every present cell in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark<T> {
    model_ids: Vec<String>,
    dataset_ids: Vec<String>,
    scores: Vec<Option<T>>,
}

/// Disjoint train/test partition of a benchmark's models.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSplit<T> {
    pub train: Benchmark<T>,
    pub test: Benchmark<T>,
    pub seed: u64,
    pub ratio: f64,
}

fn check_unique(ids: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::Schema(format!("duplicate {what} id `{id}`")));
        }
    }
    Ok(())
}

fn flatten_grid<T: Copy>(
    grid: Vec<Vec<Option<T>>>,
    rows: usize,
    cols: usize,
) -> Result<Vec<Option<T>>> {
    if grid.len() != rows {
        return Err(Error::Schema(format!(
            "score grid has {} rows, expected {rows}",
            grid.len()
        )));
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for (r, row) in grid.into_iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Schema(format!(
                "score row {r} has {} cells, expected {cols}",
                row.len()
            )));
        }
        flat.extend(row);
    }
    Ok(flat)
}

impl<T: Scalar> RawBenchmark<T> {
    pub fn new(
        model_ids: Vec<String>,
        dataset_ids: Vec<String>,
        scores: Vec<Vec<Option<T>>>,
        chance_levels: Vec<T>,
    ) -> Result<Self> {
        check_unique(&model_ids, "model")?;
        check_unique(&dataset_ids, "dataset")?;
        if chance_levels.len() != dataset_ids.len() {
            return Err(Error::Schema(format!(
                "{} chance levels for {} datasets",
                chance_levels.len(),
                dataset_ids.len()
            )));
        }
        for (id, &c) in dataset_ids.iter().zip(&chance_levels) {
            if c == T::one() {
                return Err(Error::DegenerateChance(id.clone()));
            }
            if !(c >= T::zero() && c < T::one()) {
                return Err(Error::Schema(format!(
                    "chance level {c} for dataset `{id}` is outside [0, 1)"
                )));
            }
        }
        let scores = flatten_grid(scores, model_ids.len(), dataset_ids.len())?;
        Ok(Self {
            model_ids,
            dataset_ids,
            scores,
            chance_levels,
        })
    }

    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }

    pub fn dataset_ids(&self) -> &[String] {
        &self.dataset_ids
    }

    pub fn chance_levels(&self) -> &[T] {
        &self.chance_levels
    }

    pub fn get(&self, model: usize, dataset: usize) -> Option<T> {
        self.scores[model * self.dataset_ids.len() + dataset]
    }

    pub fn present_cells(&self) -> usize {
        self.scores.iter().filter(|c| c.is_some()).count()
    }
}

impl<T: Scalar> Benchmark<T> {
    /// Builds a validated benchmark: unique ids, every present cell in
    /// `[0, 1]`, and at least two present cells per dataset column.
    pub fn new(
        model_ids: Vec<String>,
        dataset_ids: Vec<String>,
        scores: Vec<Vec<Option<T>>>,
    ) -> Result<Self> {
        check_unique(&model_ids, "model")?;
        check_unique(&dataset_ids, "dataset")?;
        let scores = flatten_grid(scores, model_ids.len(), dataset_ids.len())?;
        let bench = Self {
            model_ids,
            dataset_ids,
            scores,
        };
        bench.validate()?;
        Ok(bench)
    }

    /// Complete benchmark from a dense model × dataset matrix.
    pub fn from_dense(
        model_ids: Vec<String>,
        dataset_ids: Vec<String>,
        scores: &Matrix<T>,
    ) -> Result<Self> {
        let grid = (0..scores.rows())
            .map(|r| scores.row(r).iter().map(|&v| Some(v)).collect())
            .collect();
        Self::new(model_ids, dataset_ids, grid)
    }

    /// Dense benchmark with generated ids `m0..`, `d0..`; handy for
    /// synthetic fixtures.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let m = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let grid = rows
            .iter()
            .map(|r| r.iter().map(|&v| Some(v)).collect())
            .collect();
        Self::new(
            (0..m).map(|i| format!("m{i}")).collect(),
            (0..d).map(|j| format!("d{j}")).collect(),
            grid,
        )
    }

    fn validate(&self) -> Result<()> {
        let d = self.dataset_ids.len();
        for (idx, cell) in self.scores.iter().enumerate() {
            if let Some(v) = cell {
                if !(*v >= T::zero() && *v <= T::one()) {
                    return Err(Error::Schema(format!(
                        "normalized score {v} for ({}, {}) is outside [0, 1]",
                        self.model_ids[idx / d],
                        self.dataset_ids[idx % d]
                    )));
                }
            }
        }
        for (j, id) in self.dataset_ids.iter().enumerate() {
            let present = (0..self.n_models())
                .filter(|&i| self.get(i, j).is_some())
                .count();
            if present < 2 {
                return Err(Error::InsufficientData(format!(
                    "dataset `{id}` has {present} observed models, at least 2 are required"
                )));
            }
        }
        Ok(())
    }

    pub fn n_models(&self) -> usize {
        self.model_ids.len()
    }

    pub fn n_datasets(&self) -> usize {
        self.dataset_ids.len()
    }

    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }

    pub fn dataset_ids(&self) -> &[String] {
        &self.dataset_ids
    }

    #[inline]
    pub fn get(&self, model: usize, dataset: usize) -> Option<T> {
        self.scores[model * self.dataset_ids.len() + dataset]
    }

    pub fn column(&self, dataset: usize) -> Vec<Option<T>> {
        (0..self.n_models()).map(|i| self.get(i, dataset)).collect()
    }

    pub fn row(&self, model: usize) -> &[Option<T>] {
        let d = self.dataset_ids.len();
        &self.scores[model * d..(model + 1) * d]
    }

    /// Mean of the present cells of a dataset column.
    pub fn column_mean(&self, dataset: usize) -> T {
        let present: Vec<T> = self.column(dataset).into_iter().flatten().collect();
        crate::scalar::mean(&present).unwrap_or_else(T::zero)
    }

    /// Every missing cell as `(model_id, dataset_id)`.
    pub fn missing_cells(&self) -> Vec<(String, String)> {
        let d = self.dataset_ids.len();
        self.scores
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(idx, _)| {
                (
                    self.model_ids[idx / d].clone(),
                    self.dataset_ids[idx % d].clone(),
                )
            })
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.scores.iter().all(Option::is_some)
    }

    /// Fails with the offending cells unless every cell is present.
    pub fn require_complete(&self) -> Result<()> {
        let missing = self.missing_cells();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Incomplete(missing))
        }
    }

    /// Dense copy of the matrix; requires completeness.
    pub fn dense(&self) -> Result<Matrix<T>> {
        self.require_complete()?;
        Matrix::from_vec(
            self.n_models(),
            self.n_datasets(),
            self.scores.iter().map(|c| c.unwrap()).collect(),
        )
    }

    /// Sub-benchmark over the given model rows, in the given order.
    ///
    /// The per-column observation minimum is not re-checked here: a test
    /// half or a held-out fold may legitimately hold a single model.
    pub fn select_models(&self, rows: &[usize]) -> Benchmark<T> {
        let d = self.n_datasets();
        let mut scores = Vec::with_capacity(rows.len() * d);
        for &r in rows {
            scores.extend_from_slice(self.row(r));
        }
        Benchmark {
            model_ids: rows.iter().map(|&r| self.model_ids[r].clone()).collect(),
            dataset_ids: self.dataset_ids.clone(),
            scores,
        }
    }

    /// Index of each id, for lookups by name.
    pub fn dataset_index(&self) -> HashMap<&str, usize> {
        self.dataset_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect()
    }

    fn map_present(&self, mut f: impl FnMut(T) -> T) -> Benchmark<T> {
        Benchmark {
            model_ids: self.model_ids.clone(),
            dataset_ids: self.dataset_ids.clone(),
            scores: self.scores.iter().map(|c| c.map(&mut f)).collect(),
        }
    }
}

fn trimmed(field: &str) -> &str {
    field.trim().trim_start_matches('\u{feff}')
}

fn parse_cell<T: Scalar>(field: &str, row: usize, column: usize) -> Result<Option<T>> {
    let field = trimmed(field);
    if field.is_empty() {
        return Ok(None);
    }
    match field.parse::<T>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Err(Error::Parse {
            row,
            column,
            message: format!("non-finite value `{field}`"),
        }),
        Err(_) => Err(Error::Parse {
            row,
            column,
            message: format!("`{field}` is not a number"),
        }),
    }
}

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source)
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        row,
        column: 0,
        message: e.to_string(),
    }
}

/// Reads a score table and its chance-level table.
///
/// The score table is comma-delimited: the first row holds `model_id`
/// followed by dataset ids, every further row a model id followed by its
/// scores, and an empty field marks a missing cell. The chance table has
/// two columns, `dataset_id,chance_level`, with an optional header row.
/// Parse errors carry 1-based file coordinates.
pub fn load_benchmark<T: Scalar, R1: Read, R2: Read>(
    source: R1,
    chance_source: R2,
) -> Result<RawBenchmark<T>> {
    let mut records = csv_reader(source).into_records();
    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => return Err(Error::Schema("score table is empty".into())),
    };
    let dataset_ids: Vec<String> = header.iter().skip(1).map(|s| trimmed(s).to_string()).collect();
    if dataset_ids.is_empty() {
        return Err(Error::Schema("score table has no dataset columns".into()));
    }
    if let Some(pos) = dataset_ids.iter().position(String::is_empty) {
        return Err(Error::Schema(format!("dataset id in column {} is empty", pos + 2)));
    }

    let mut model_ids = Vec::new();
    let mut grid = Vec::new();
    for (offset, rec) in records.enumerate() {
        let rec = rec.map_err(csv_error)?;
        let row = offset + 2;
        if rec.len() == 1 && trimmed(&rec[0]).is_empty() {
            continue;
        }
        if rec.len() != dataset_ids.len() + 1 {
            return Err(Error::Schema(format!(
                "row {row} has {} fields, expected {}",
                rec.len(),
                dataset_ids.len() + 1
            )));
        }
        let id = trimmed(&rec[0]).to_string();
        if id.is_empty() {
            return Err(Error::Schema(format!("row {row} has an empty model id")));
        }
        model_ids.push(id);
        grid.push(
            rec.iter()
                .enumerate()
                .skip(1)
                .map(|(c, f)| parse_cell::<T>(f, row, c + 1))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if model_ids.is_empty() {
        return Err(Error::Schema("score table has no model rows".into()));
    }
    check_unique(&model_ids, "model")?;
    check_unique(&dataset_ids, "dataset")?;

    let mut chance: HashMap<String, T> = HashMap::new();
    for (offset, rec) in csv_reader(chance_source).into_records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let row = offset + 1;
        if rec.len() == 1 && trimmed(&rec[0]).is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Schema(format!(
                "chance table row {row} has {} fields, expected 2",
                rec.len()
            )));
        }
        let id = trimmed(&rec[0]).to_string();
        let value = match parse_cell::<T>(&rec[1], row, 2) {
            Ok(Some(v)) => v,
            // a non-numeric first row is the header
            Err(_) if row == 1 => continue,
            Ok(None) => {
                return Err(Error::Parse {
                    row,
                    column: 2,
                    message: format!("chance level for `{id}` is empty"),
                })
            }
            Err(e) => return Err(e),
        };
        if chance.insert(id.clone(), value).is_some() {
            return Err(Error::Schema(format!("duplicate chance entry for `{id}`")));
        }
    }
    let chance_levels = dataset_ids
        .iter()
        .map(|id| {
            chance
                .get(id)
                .copied()
                .ok_or_else(|| Error::Schema(format!("no chance level for dataset `{id}`")))
        })
        .collect::<Result<Vec<_>>>()?;

    RawBenchmark::new(model_ids, dataset_ids, grid, chance_levels)
}

/// Rescales each present cell to the fraction of headroom above chance,
/// `max(0, (x - chance) / (1 - chance))`, then clamps to `[0, 1]`.
pub fn normalize_scores<T: Scalar>(raw: &RawBenchmark<T>) -> Result<Benchmark<T>> {
    let d = raw.dataset_ids.len();
    for (id, &c) in raw.dataset_ids.iter().zip(&raw.chance_levels) {
        if c >= T::one() {
            return Err(Error::DegenerateChance(id.clone()));
        }
    }
    let scores = raw
        .scores
        .iter()
        .enumerate()
        .map(|(idx, cell)| {
            cell.map(|x| {
                let chance = raw.chance_levels[idx % d];
                ((x - chance) / (T::one() - chance)).clamp_unit()
            })
        })
        .collect();
    let bench = Benchmark {
        model_ids: raw.model_ids.clone(),
        dataset_ids: raw.dataset_ids.clone(),
        scores,
    };
    bench.validate()?;
    Ok(bench)
}

/// Number of training models for a split: `round(ratio * m)` with halves
/// going to the training side.
pub fn train_size(n_models: usize, ratio: f64) -> usize {
    (ratio * n_models as f64 + 0.5).floor() as usize
}

/// Seeded random partition of models into train and test halves. Both
/// halves keep the source's row order and the full dataset list.
pub fn split_models<T: Scalar>(bench: &Benchmark<T>, ratio: f64, seed: u64) -> Result<ModelSplit<T>> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Split(format!("ratio {ratio} is outside (0, 1)")));
    }
    let m = bench.n_models();
    let n_train = train_size(m, ratio);
    if n_train == 0 || n_train >= m {
        return Err(Error::Split(format!(
            "ratio {ratio} over {m} models leaves an empty half ({n_train} train)"
        )));
    }
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(&mut seeded_rng(seed));
    let mut train_rows = perm[..n_train].to_vec();
    let mut test_rows = perm[n_train..].to_vec();
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok(ModelSplit {
        train: bench.select_models(&train_rows),
        test: bench.select_models(&test_rows),
        seed,
        ratio,
    })
}

/// Adds independent `N(mean, sigma^2)` noise to every present cell and
/// clamps back into `[0, 1]`. Cells are visited in row-major order, so the
/// result depends only on the matrix, the parameters and the seed.
pub fn perturb_with_noise<T: Scalar>(
    bench: &Benchmark<T>,
    mean: T,
    sigma: T,
    seed: u64,
) -> Result<Benchmark<T>> {
    if !(sigma >= T::zero()) {
        return Err(Error::Config(format!("noise sigma {sigma} must be non-negative")));
    }
    let mut rng = seeded_rng(seed);
    Ok(bench.map_present(|v| {
        let z: f64 = StandardNormal.sample(&mut rng);
        (v + mean + sigma * T::lit(z)).clamp_unit()
    }))
}

/// Applies a fixed additive offset to every present cell with the same
/// clamp as [`perturb_with_noise`].
pub fn shift_and_clamp<T: Scalar>(bench: &Benchmark<T>, offset: T) -> Benchmark<T> {
    bench.map_present(|v| (v + offset).clamp_unit())
}
