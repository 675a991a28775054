//! Run configuration: defaults, a flat `key = value` file format and
//! per-key overrides.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use simba_core::perfpredict::{DEFAULT_KNN_K, DEFAULT_RIDGE_LAMBDA, DEFAULT_SUBSET_COVERAGE};
use simba_core::relate::DEFAULT_R2_THRESHOLD;
use simba_core::repset::DEFAULT_COVERAGE_THRESHOLD;
use simba_core::{Measure, PredictorKind};

use crate::error::{input_err, CliResult};
use crate::format::fmt_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Stalk,
    Prowl,
    Pounce,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Stalk, Phase::Prowl, Phase::Pounce];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Stalk => "stalk",
            Phase::Prowl => "prowl",
            Phase::Pounce => "pounce",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Phase::ALL
            .into_iter()
            .find(|p| p.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown phase `{s}`"))
    }
}

/// Every configurable key, in the order they are reported.
pub const KEYS: [&str; 24] = [
    "matrix_path",
    "chance_path",
    "output_dir",
    "similarity_dir",
    "phases",
    "seed",
    "measures",
    "r2_threshold",
    "gamma",
    "coverage_threshold",
    "beam_width",
    "random_runs",
    "split_ratio",
    "pounce_measure",
    "subset_coverage",
    "predictors",
    "ridge_lambda",
    "knn_k",
    "mlp_learning_rate",
    "mlp_max_iterations",
    "mlp_min_improvement",
    "noise_sigmas",
    "noise_mean",
    "k_folds",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub matrix_path: Option<PathBuf>,
    pub chance_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    /// Directory of previously written `similarity_<measure>.csv` files.
    pub similarity_dir: Option<PathBuf>,
    /// Phases run by `simba all`.
    pub phases: Vec<Phase>,
    pub seed: Option<u64>,
    pub measures: Vec<Measure>,
    pub r2_threshold: f64,
    pub gamma: f64,
    pub coverage_threshold: f64,
    pub beam_width: usize,
    pub random_runs: usize,
    pub split_ratio: f64,
    pub pounce_measure: Measure,
    pub subset_coverage: f64,
    pub predictors: Vec<PredictorKind>,
    pub ridge_lambda: f64,
    pub knn_k: usize,
    pub mlp_learning_rate: f64,
    pub mlp_max_iterations: usize,
    pub mlp_min_improvement: f64,
    pub noise_sigmas: Vec<f64>,
    pub noise_mean: f64,
    pub k_folds: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            matrix_path: None,
            chance_path: None,
            output_dir: None,
            similarity_dir: None,
            phases: Phase::ALL.to_vec(),
            seed: None,
            measures: Measure::ALL.to_vec(),
            r2_threshold: DEFAULT_R2_THRESHOLD,
            gamma: 1.0,
            coverage_threshold: DEFAULT_COVERAGE_THRESHOLD,
            beam_width: 1,
            random_runs: 1000,
            split_ratio: 0.8,
            pounce_measure: Measure::MinkowskiP3,
            subset_coverage: DEFAULT_SUBSET_COVERAGE,
            predictors: PredictorKind::ALL.to_vec(),
            ridge_lambda: DEFAULT_RIDGE_LAMBDA,
            knn_k: DEFAULT_KNN_K,
            mlp_learning_rate: 0.01,
            mlp_max_iterations: 5000,
            mlp_min_improvement: 1e-8,
            noise_sigmas: vec![0.0, 0.05, 0.1],
            noise_mean: 0.0,
            k_folds: 5,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .trim()
        .parse()
        .map_err(|_| input_err!("`{key}`: cannot parse `{value}`"))
}

fn parse_list<T>(key: &str, value: &str, item: impl Fn(&str) -> CliResult<T>) -> CliResult<Vec<T>> {
    let items: Vec<&str> = value.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(input_err!("`{key}`: empty entry in list `{value}`"));
    }
    items.into_iter().map(item).collect()
}

fn resolve(base: Option<&Path>, value: &str) -> PathBuf {
    let p = PathBuf::from(value.trim());
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p,
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one key from its textual value. Relative paths are resolved
    /// against `base` when given.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> CliResult<()> {
        match key {
            "matrix_path" => self.matrix_path = Some(resolve(base, value)),
            "chance_path" => self.chance_path = Some(resolve(base, value)),
            "output_dir" => self.output_dir = Some(resolve(base, value)),
            "similarity_dir" => self.similarity_dir = Some(resolve(base, value)),
            "phases" => {
                self.phases = parse_list(key, value, |s| s.parse().map_err(|e: String| input_err!("`{key}`: {e}")))?
            }
            "seed" => self.seed = Some(parse_num(key, value)?),
            "measures" => {
                self.measures = parse_list(key, value, |s| s.parse::<Measure>().map_err(|e| input_err!("`{key}`: {e}")))?
            }
            "r2_threshold" => self.r2_threshold = parse_num(key, value)?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "coverage_threshold" => self.coverage_threshold = parse_num(key, value)?,
            "beam_width" => self.beam_width = parse_num(key, value)?,
            "random_runs" => self.random_runs = parse_num(key, value)?,
            "split_ratio" => self.split_ratio = parse_num(key, value)?,
            "pounce_measure" => {
                self.pounce_measure = value.parse().map_err(|e| input_err!("`{key}`: {e}"))?
            }
            "subset_coverage" => self.subset_coverage = parse_num(key, value)?,
            "predictors" => {
                self.predictors =
                    parse_list(key, value, |s| s.parse::<PredictorKind>().map_err(|e| input_err!("`{key}`: {e}")))?
            }
            "ridge_lambda" => self.ridge_lambda = parse_num(key, value)?,
            "knn_k" => self.knn_k = parse_num(key, value)?,
            "mlp_learning_rate" => self.mlp_learning_rate = parse_num(key, value)?,
            "mlp_max_iterations" => self.mlp_max_iterations = parse_num(key, value)?,
            "mlp_min_improvement" => self.mlp_min_improvement = parse_num(key, value)?,
            "noise_sigmas" => self.noise_sigmas = parse_list(key, value, |s| parse_num(key, s))?,
            "noise_mean" => self.noise_mean = parse_num(key, value)?,
            "k_folds" => self.k_folds = parse_num(key, value)?,
            _ => return Err(input_err!("unknown configuration key `{key}`")),
        }
        Ok(())
    }

    /// Applies a config document. Blank lines and `#` comments are
    /// ignored; every other line is `key = value`.
    pub fn apply_text(&mut self, text: &str, base: Option<&Path>) -> CliResult<()> {
        let mut seen = BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| input_err!("config line {}: expected `key = value`", n + 1))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(input_err!("config line {}: `{key}` set twice", n + 1));
            }
            self.set(key, value.trim(), base)
                .map_err(|e| input_err!("config line {}: {e}", n + 1))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input_err!("cannot read config {}: {e}", path.display()))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text, path.parent())?;
        Ok(cfg)
    }

    /// Checks ranges and the keys required by `phases`.
    pub fn validate(&self, phases: &[Phase]) -> CliResult<()> {
        let unit_open = |v: f64| v > 0.0 && v <= 1.0;
        for (key, missing) in [
            ("matrix_path", self.matrix_path.is_none()),
            ("chance_path", self.chance_path.is_none()),
            ("output_dir", self.output_dir.is_none()),
        ] {
            if missing {
                return Err(input_err!("`{key}` is required"));
            }
        }
        if self.seed.is_none() && phases.iter().any(|p| *p != Phase::Stalk) {
            return Err(input_err!("`--seed` is required for prowl and pounce"));
        }
        let checks: [(&str, bool); 15] = [
            ("phases", !self.phases.is_empty() && distinct(&self.phases)),
            ("measures", !self.measures.is_empty() && distinct(&self.measures)),
            ("predictors", !self.predictors.is_empty() && distinct(&self.predictors)),
            ("r2_threshold", (0.0..=1.0).contains(&self.r2_threshold)),
            ("gamma", unit_open(self.gamma)),
            ("coverage_threshold", unit_open(self.coverage_threshold)),
            ("subset_coverage", unit_open(self.subset_coverage)),
            ("beam_width", self.beam_width >= 1),
            ("random_runs", self.random_runs >= 1),
            ("split_ratio", self.split_ratio > 0.0 && self.split_ratio < 1.0),
            ("ridge_lambda", self.ridge_lambda >= 0.0 && self.ridge_lambda.is_finite()),
            ("knn_k", self.knn_k >= 1),
            (
                "mlp_learning_rate",
                self.mlp_learning_rate > 0.0 && self.mlp_learning_rate.is_finite(),
            ),
            ("mlp_max_iterations", self.mlp_max_iterations >= 1),
            ("k_folds", self.k_folds >= 2),
        ];
        if let Some((key, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(input_err!("`{key}` = {} is out of range", self.value_of(key)));
        }
        let sigmas_ok = !self.noise_sigmas.is_empty()
            && self.noise_sigmas.iter().all(|s| s.is_finite() && *s >= 0.0)
            && distinct_reals(&self.noise_sigmas);
        if !sigmas_ok {
            return Err(input_err!(
                "`noise_sigmas` must be distinct, finite and non-negative"
            ));
        }
        if !self.noise_mean.is_finite() || !(self.mlp_min_improvement >= 0.0) {
            return Err(input_err!("`noise_mean` and `mlp_min_improvement` must be finite"));
        }
        Ok(())
    }

    /// Canonical textual value of a key, as accepted by [`RunConfig::set`].
    pub fn value_of(&self, key: &str) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let reals = |v: &[f64]| v.iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join(",");
        match key {
            "matrix_path" => path(&self.matrix_path),
            "chance_path" => path(&self.chance_path),
            "output_dir" => path(&self.output_dir),
            "similarity_dir" => path(&self.similarity_dir),
            "phases" => join(&self.phases),
            "seed" => self.seed.map(|s| s.to_string()).unwrap_or_default(),
            "measures" => join(&self.measures),
            "r2_threshold" => fmt_real(self.r2_threshold),
            "gamma" => fmt_real(self.gamma),
            "coverage_threshold" => fmt_real(self.coverage_threshold),
            "beam_width" => self.beam_width.to_string(),
            "random_runs" => self.random_runs.to_string(),
            "split_ratio" => fmt_real(self.split_ratio),
            "pounce_measure" => self.pounce_measure.to_string(),
            "subset_coverage" => fmt_real(self.subset_coverage),
            "predictors" => join(&self.predictors),
            "ridge_lambda" => fmt_real(self.ridge_lambda),
            "knn_k" => self.knn_k.to_string(),
            "mlp_learning_rate" => fmt_real(self.mlp_learning_rate),
            "mlp_max_iterations" => self.mlp_max_iterations.to_string(),
            "mlp_min_improvement" => fmt_real(self.mlp_min_improvement),
            "noise_sigmas" => reals(&self.noise_sigmas),
            "noise_mean" => fmt_real(self.noise_mean),
            "k_folds" => self.k_folds.to_string(),
            _ => String::new(),
        }
    }
}

fn distinct<T: Ord>(items: &[T]) -> bool {
    items.iter().collect::<BTreeSet<_>>().len() == items.len()
}

fn distinct_reals(items: &[f64]) -> bool {
    items.iter().map(|v| v.to_bits()).collect::<BTreeSet<_>>().len() == items.len()
}
