//! Predicting scores on the remaining datasets from scores on a
//! representative subset, and the error curves built from it.

pub mod knn;
pub mod mlp;
pub mod ridge;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::auc::anchored_area;
use crate::benchio::{perturb_with_noise, Benchmark, ModelSplit};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::repset::SelectionTrace;
use crate::scalar::Scalar;
use crate::seeded_rng;

pub use knn::KnnModel;
pub use mlp::{MlpModel, MlpTraining};
pub use ridge::RidgeModel;

pub const DEFAULT_RIDGE_LAMBDA: f64 = 1.0;
pub const DEFAULT_KNN_K: usize = 5;
/// Proxy coverage at which the pounce-phase representative subset is cut.
pub const DEFAULT_SUBSET_COVERAGE: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredictorKind {
    Ridge,
    Knn,
    Mlp1,
    Mlp2,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 4] = [
        PredictorKind::Ridge,
        PredictorKind::Knn,
        PredictorKind::Mlp1,
        PredictorKind::Mlp2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PredictorKind::Ridge => "ridge",
            PredictorKind::Knn => "knn",
            PredictorKind::Mlp1 => "mlp1",
            PredictorKind::Mlp2 => "mlp2",
        }
    }

    /// Hidden layer widths of the two fixed network shapes.
    pub fn hidden_layers(self) -> Vec<usize> {
        match self {
            PredictorKind::Mlp1 => vec![12],
            PredictorKind::Mlp2 => vec![12, 12],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        PredictorKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown predictor `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorSpec<T> {
    pub kind: PredictorKind,
    pub ridge_lambda: T,
    pub knn_k: usize,
    pub mlp_hidden: Vec<usize>,
    pub mlp_training: MlpTraining,
    pub seed: u64,
}

impl<T: Scalar> PredictorSpec<T> {
    /// Spec with default hyperparameters for `kind`.
    pub fn new(kind: PredictorKind, seed: u64) -> Self {
        Self {
            kind,
            ridge_lambda: T::lit(DEFAULT_RIDGE_LAMBDA),
            knn_k: DEFAULT_KNN_K,
            mlp_hidden: kind.hidden_layers(),
            mlp_training: MlpTraining::default(),
            seed,
        }
    }

    pub fn ridge(lambda: T) -> Self {
        Self {
            ridge_lambda: lambda,
            ..Self::new(PredictorKind::Ridge, 0)
        }
    }

    pub fn knn(k: usize) -> Self {
        Self {
            knn_k: k,
            ..Self::new(PredictorKind::Knn, 0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ridge_lambda >= T::zero()) {
            return Err(Error::Config(format!(
                "ridge lambda {} must be non-negative",
                self.ridge_lambda
            )));
        }
        if self.knn_k == 0 {
            return Err(Error::Config("knn k must be at least 1".into()));
        }
        if matches!(self.kind, PredictorKind::Mlp1 | PredictorKind::Mlp2)
            && self.mlp_hidden != self.kind.hidden_layers()
        {
            return Err(Error::Config(format!(
                "{} has hidden layers {:?}, got {:?}",
                self.kind,
                self.kind.hidden_layers(),
                self.mlp_hidden
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Learned<T> {
    Ridge(RidgeModel<T>),
    Knn(KnnModel<T>),
    Mlp(MlpModel<T>),
}

/// Trained mapping from subset scores to remaining-dataset scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictor<T> {
    pub spec: PredictorSpec<T>,
    pub input_ids: Vec<String>,
    pub output_ids: Vec<String>,
    n_inputs: usize,
    n_outputs: usize,
    learned: Learned<T>,
}

impl<T: Scalar> Predictor<T> {
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    /// Attaches dataset ids to the input and output columns.
    pub fn with_ids(mut self, input_ids: Vec<String>, output_ids: Vec<String>) -> Result<Self> {
        if input_ids.len() != self.n_inputs || output_ids.len() != self.n_outputs {
            return Err(Error::Shape("id lists do not match predictor arity".into()));
        }
        self.input_ids = input_ids;
        self.output_ids = output_ids;
        Ok(self)
    }

    pub fn knn_effective_k(&self) -> Option<usize> {
        match &self.learned {
            Learned::Knn(m) => Some(m.k()),
            _ => None,
        }
    }
}

/// Fits one predictor. Grids are row-per-model and must agree on row
/// count; every kind is deterministic for a fixed spec.
pub fn train_predictor<T: Scalar>(
    train_inputs: &Matrix<T>,
    train_targets: &Matrix<T>,
    spec: &PredictorSpec<T>,
) -> Result<Predictor<T>> {
    spec.validate()?;
    if train_inputs.rows() != train_targets.rows() {
        return Err(Error::Shape(format!(
            "{} input rows vs {} target rows",
            train_inputs.rows(),
            train_targets.rows()
        )));
    }
    if train_inputs.rows() == 0 || train_inputs.cols() == 0 || train_targets.cols() == 0 {
        return Err(Error::Shape("training grids must be non-empty".into()));
    }
    let learned = match spec.kind {
        PredictorKind::Ridge => {
            Learned::Ridge(RidgeModel::fit(train_inputs, train_targets, spec.ridge_lambda)?)
        }
        PredictorKind::Knn => Learned::Knn(KnnModel::fit(train_inputs, train_targets, spec.knn_k)),
        PredictorKind::Mlp1 | PredictorKind::Mlp2 => Learned::Mlp(MlpModel::train(
            train_inputs,
            train_targets,
            &spec.mlp_hidden,
            spec.seed,
            spec.mlp_training,
        )),
    };
    Ok(Predictor {
        spec: spec.clone(),
        input_ids: Vec::new(),
        output_ids: Vec::new(),
        n_inputs: train_inputs.cols(),
        n_outputs: train_targets.cols(),
        learned,
    })
}

/// One prediction row per input row, clamped to `[0, 1]`.
pub fn predict_scores<T: Scalar>(pred: &Predictor<T>, inputs: &Matrix<T>) -> Result<Matrix<T>> {
    if inputs.cols() != pred.n_inputs {
        return Err(Error::Shape(format!(
            "predictor expects {} inputs, got {}",
            pred.n_inputs,
            inputs.cols()
        )));
    }
    let raw = match &pred.learned {
        Learned::Ridge(m) => m.predict_raw(inputs),
        Learned::Knn(m) => m.predict(inputs),
        Learned::Mlp(m) => m.predict_raw(inputs),
    };
    Ok(raw.map(Scalar::clamp_unit))
}

/// Test MSE per subset size `1..=d-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MseCurve<T> {
    pub sizes: Vec<usize>,
    pub mses: Vec<T>,
    pub spec: PredictorSpec<T>,
    pub noise_sigma: T,
}

impl<T: Scalar> MseCurve<T> {
    pub fn auc(&self) -> T {
        auc_mse(self)
    }

    /// Test MSE at a given subset size, if on the curve.
    pub fn at_size(&self, size: usize) -> Option<T> {
        self.sizes.iter().position(|&s| s == size).map(|p| self.mses[p])
    }
}

fn columns<T: Scalar>(dense: &Matrix<T>, cols: &[usize]) -> Matrix<T> {
    let mut out = Matrix::zeros(dense.rows(), cols.len());
    for r in 0..dense.rows() {
        for (k, &c) in cols.iter().enumerate() {
            out.set(r, k, dense.get(r, c));
        }
    }
    out
}

fn check_full_order(order: &[usize], d: usize) -> Result<()> {
    let mut seen = vec![false; d];
    let ok = order.len() == d
        && order
            .iter()
            .all(|&j| j < d && !std::mem::replace(&mut seen[j], true));
    if ok {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "MSE curves need a full ordering of {d} datasets"
        )))
    }
}

/// Test MSE of a predictor trained on `train` and evaluated on `test` at
/// one subset size.
pub fn subset_mse<T: Scalar>(
    train: &Matrix<T>,
    test: &Matrix<T>,
    order: &[usize],
    size: usize,
    spec: &PredictorSpec<T>,
) -> Result<T> {
    let (subset, rest) = order.split_at(size);
    let pred = train_predictor(&columns(train, subset), &columns(train, rest), spec)?;
    let predicted = predict_scores(&pred, &columns(test, subset))?;
    predicted.mse(&columns(test, rest))
}

fn curve_between<T: Scalar>(
    train: &Benchmark<T>,
    test: &Benchmark<T>,
    trace: &SelectionTrace<T>,
    spec: &PredictorSpec<T>,
    noise_sigma: T,
) -> Result<MseCurve<T>> {
    spec.validate()?;
    let d = train.n_datasets();
    if d < 2 {
        return Err(Error::InsufficientData("MSE curves need at least 2 datasets".into()));
    }
    if test.n_models() == 0 || train.n_models() == 0 {
        return Err(Error::InsufficientData("MSE curves need train and test models".into()));
    }
    check_full_order(&trace.order, d)?;
    let train_m = train.dense()?;
    let test_m = test.dense()?;
    let sizes: Vec<usize> = (1..d).collect();
    let mses = sizes
        .par_iter()
        .map(|&k| subset_mse(&train_m, &test_m, &trace.order, k, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(MseCurve {
        sizes,
        mses,
        spec: spec.clone(),
        noise_sigma,
    })
}

/// Trains on the split's train models at every prefix size of `trace` and
/// reports MSE over all (test model, remaining dataset) cells.
pub fn mse_curve<T: Scalar>(
    split: &ModelSplit<T>,
    trace: &SelectionTrace<T>,
    spec: &PredictorSpec<T>,
) -> Result<MseCurve<T>> {
    curve_between(&split.train, &split.test, trace, spec, T::zero())
}

/// Gaussian perturbation applied to training scores before fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise<T> {
    pub mean: T,
    pub sigma: T,
    pub seed: u64,
}

/// [`mse_curve`] with the training half perturbed first; test scores are
/// left untouched.
pub fn mse_curve_with_noise<T: Scalar>(
    split: &ModelSplit<T>,
    trace: &SelectionTrace<T>,
    spec: &PredictorSpec<T>,
    noise: Noise<T>,
) -> Result<MseCurve<T>> {
    let noisy = perturb_with_noise(&split.train, noise.mean, noise.sigma, noise.seed)?;
    curve_between(&noisy, &split.test, trace, spec, noise.sigma)
}

/// Area under the MSE curve against normalized size `k / (d - 1)`, the
/// first value held back to zero. Lower is better.
pub fn auc_mse<T: Scalar>(curve: &MseCurve<T>) -> T {
    anchored_area(&curve.mses)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KFoldReport<T> {
    pub per_fold: Vec<T>,
    pub mean: T,
    /// Population standard deviation over folds.
    pub std_dev: T,
}

/// Cross-validated AUC-MSE over the training models only. Fold membership
/// comes from a permutation seeded by `spec.seed`: position `p` goes to
/// fold `p mod k_folds`.
pub fn kfold_stability<T: Scalar>(
    train_bench: &Benchmark<T>,
    trace: &SelectionTrace<T>,
    spec: &PredictorSpec<T>,
    k_folds: usize,
) -> Result<KFoldReport<T>> {
    let n = train_bench.n_models();
    if k_folds < 2 || k_folds > n {
        return Err(Error::Config(format!(
            "k_folds = {k_folds} must lie in [2, {n}] for {n} training models"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seeded_rng(spec.seed));
    let per_fold = (0..k_folds)
        .map(|f| {
            let (mut held, mut kept) = (Vec::new(), Vec::new());
            for (p, &row) in perm.iter().enumerate() {
                if p % k_folds == f {
                    held.push(row);
                } else {
                    kept.push(row);
                }
            }
            held.sort_unstable();
            kept.sort_unstable();
            let curve = curve_between(
                &train_bench.select_models(&kept),
                &train_bench.select_models(&held),
                trace,
                spec,
                T::zero(),
            )?;
            Ok(auc_mse(&curve))
        })
        .collect::<Result<Vec<T>>>()?;
    let k = T::from_count(k_folds);
    let mean = per_fold.iter().copied().sum::<T>() / k;
    let var = per_fold.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / k;
    Ok(KFoldReport {
        per_fold,
        mean,
        std_dev: var.sqrt(),
    })
}
