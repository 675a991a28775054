//! `simba` command-line front end: configuration, phase orchestration and
//! report files.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod format;
pub mod report;
pub mod run;

use std::path::PathBuf;

use clap::{Args, Parser, ValueEnum};

pub use config::{Phase, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Relationship census over dataset and model pairs.
    Stalk,
    /// Representative dataset discovery and coverage curves.
    Prowl,
    /// Held-out performance prediction from the representative subset.
    Pounce,
    /// Every phase listed under `phases` (all three by default).
    All,
}

#[derive(Debug, Parser)]
#[command(name = "simba", version, about = "Benchmark matrix analysis")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// One flag per configuration key; a flag wins over the file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, value_name = "PATH")]
    pub matrix_path: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub chance_path: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub similarity_dir: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub phases: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub measures: Option<String>,
    #[arg(long)]
    pub r2_threshold: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub coverage_threshold: Option<String>,
    #[arg(long)]
    pub beam_width: Option<String>,
    #[arg(long)]
    pub random_runs: Option<String>,
    #[arg(long)]
    pub split_ratio: Option<String>,
    #[arg(long)]
    pub pounce_measure: Option<String>,
    #[arg(long)]
    pub subset_coverage: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub predictors: Option<String>,
    #[arg(long)]
    pub ridge_lambda: Option<String>,
    #[arg(long)]
    pub knn_k: Option<String>,
    #[arg(long)]
    pub mlp_learning_rate: Option<String>,
    #[arg(long)]
    pub mlp_max_iterations: Option<String>,
    #[arg(long)]
    pub mlp_min_improvement: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub noise_sigmas: Option<String>,
    #[arg(long)]
    pub noise_mean: Option<String>,
    #[arg(long)]
    pub k_folds: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> [(&'static str, &Option<String>); 24] {
        [
            ("matrix_path", &self.matrix_path),
            ("chance_path", &self.chance_path),
            ("output_dir", &self.output_dir),
            ("similarity_dir", &self.similarity_dir),
            ("phases", &self.phases),
            ("seed", &self.seed),
            ("measures", &self.measures),
            ("r2_threshold", &self.r2_threshold),
            ("gamma", &self.gamma),
            ("coverage_threshold", &self.coverage_threshold),
            ("beam_width", &self.beam_width),
            ("random_runs", &self.random_runs),
            ("split_ratio", &self.split_ratio),
            ("pounce_measure", &self.pounce_measure),
            ("subset_coverage", &self.subset_coverage),
            ("predictors", &self.predictors),
            ("ridge_lambda", &self.ridge_lambda),
            ("knn_k", &self.knn_k),
            ("mlp_learning_rate", &self.mlp_learning_rate),
            ("mlp_max_iterations", &self.mlp_max_iterations),
            ("mlp_min_improvement", &self.mlp_min_improvement),
            ("noise_sigmas", &self.noise_sigmas),
            ("noise_mean", &self.noise_mean),
            ("k_folds", &self.k_folds),
        ]
    }

    pub fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        for (key, value) in self.pairs() {
            if let Some(v) = value {
                cfg.set(key, v, None).map_err(|e| CliError::Input(format!("--{}: {e}", key.replace('_', "-"))))?;
            }
        }
        Ok(())
    }
}

impl Cli {
    /// Config file (if any) with flag overrides applied.
    pub fn resolve(&self) -> CliResult<(RunConfig, Vec<Phase>)> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        self.overrides.apply(&mut cfg)?;
        let phases = match self.command {
            Command::Stalk => vec![Phase::Stalk],
            Command::Prowl => vec![Phase::Prowl],
            Command::Pounce => vec![Phase::Pounce],
            Command::All => {
                let mut p = cfg.phases.clone();
                p.sort();
                p
            }
        };
        Ok((cfg, phases))
    }

    pub fn run(&self) -> CliResult<Vec<PathBuf>> {
        let (cfg, phases) = self.resolve()?;
        run::execute(&cfg, &phases)
    }
}
