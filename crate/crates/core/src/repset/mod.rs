//! Representative subset discovery and coverage evaluation.

pub mod coverage;
pub mod discovery;

pub use coverage::{
    coverage, coverage_curve, mean_win_rate, proportion_vs_random, random_baseline, sc_auc,
    smallest_covering_prefix, CoverageCurve, CoverageEvaluator, RandomBaseline, VersusRandom,
    DEFAULT_COVERAGE_THRESHOLD,
};
pub use discovery::{
    baseline_order, coverage_gain, discover_representative, proxy_coverage, BaselineKind,
    SelectionMethod, SelectionTrace,
};
