//! Benchmark-matrix analysis in three phases.
//!
//! * **stalk** ([`relate`]): classify every dataset pair and model pair as
//!   linear, exponential, power-law or unrelated.
//! * **prowl** ([`simmeasure`], [`repset`]): pick a small set of datasets
//!   that preserves the benchmark's model ranking.
//! * **pounce** ([`perfpredict`]): predict held-out models' scores on the
//!   remaining datasets from their scores on that set.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common `f64` and `f32` instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod auc;
pub mod benchio;
pub mod error;
pub mod matrix;
pub mod perfpredict;
pub mod relate;
pub mod repset;
pub mod scalar;
pub mod simmeasure;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use benchio::{
    load_benchmark, normalize_scores, perturb_with_noise, split_models, Benchmark, ModelSplit,
    RawBenchmark,
};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use perfpredict::{
    auc_mse, kfold_stability, mse_curve, mse_curve_with_noise, predict_scores, train_predictor,
    KFoldReport, MseCurve, Noise, Predictor, PredictorKind, PredictorSpec,
};
pub use relate::{
    classify_relationship, compare_all_datasets, compare_all_models, fit_pair_regression, Family,
    FitResult, RelationshipCensus, RelationshipClass, RelationshipVerdict,
};
pub use repset::{
    baseline_order, coverage, coverage_curve, coverage_gain, discover_representative,
    mean_win_rate, proportion_vs_random, proxy_coverage, sc_auc, smallest_covering_prefix,
    BaselineKind, CoverageCurve, CoverageEvaluator, SelectionMethod, SelectionTrace,
};
pub use scalar::Scalar;
pub use simmeasure::{column_similarity, similarity_matrix, Measure, SimilarityMatrix};

/// Deterministic generator used for every seeded operation.
pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub type RawBenchmark64 = RawBenchmark<f64>;
pub type Benchmark64 = Benchmark<f64>;
pub type ModelSplit64 = ModelSplit<f64>;
pub type SimilarityMatrix64 = SimilarityMatrix<f64>;
pub type SelectionTrace64 = SelectionTrace<f64>;
pub type CoverageCurve64 = CoverageCurve<f64>;
pub type MseCurve64 = MseCurve<f64>;
pub type PredictorSpec64 = PredictorSpec<f64>;
pub type RelationshipCensus64 = RelationshipCensus<f64>;

pub type RawBenchmark32 = RawBenchmark<f32>;
pub type Benchmark32 = Benchmark<f32>;
pub type ModelSplit32 = ModelSplit<f32>;
pub type SimilarityMatrix32 = SimilarityMatrix<f32>;
pub type SelectionTrace32 = SelectionTrace<f32>;
pub type CoverageCurve32 = CoverageCurve<f32>;
pub type MseCurve32 = MseCurve<f32>;
pub type PredictorSpec32 = PredictorSpec<f32>;
pub type RelationshipCensus32 = RelationshipCensus<f32>;
