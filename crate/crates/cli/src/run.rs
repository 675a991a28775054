//! Phase runners. Each one only adds artifacts to an [`ArtifactSet`];
//! nothing touches the filesystem until every requested phase succeeded.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use simba_core::perfpredict::MlpTraining;
use simba_core::repset::{proportion_vs_random, random_baseline};
use simba_core::{
    auc_mse, baseline_order, compare_all_datasets, compare_all_models, discover_representative,
    kfold_stability, load_benchmark, mse_curve_with_noise, normalize_scores, similarity_matrix,
    split_models, Benchmark, BaselineKind, CoverageCurve, CoverageEvaluator, Measure, Noise,
    PredictorKind, PredictorSpec, RelationshipCensus, RelationshipClass, SelectionTrace,
    SimilarityMatrix,
};

use crate::config::{Phase, RunConfig, KEYS};
use crate::error::{input_err, CliError, CliResult};
use crate::format::{fmt_real, json_real};
use crate::report::{ArtifactSet, Table};

type Bench = Benchmark<f64>;

fn open(path: &Path, what: &str) -> CliResult<File> {
    File::open(path).map_err(|e| input_err!("cannot open {what} {}: {e}", path.display()))
}

/// Loads and normalizes the score matrix named by the config.
pub fn load(cfg: &RunConfig) -> CliResult<Bench> {
    let matrix = cfg.matrix_path.as_deref().ok_or_else(|| input_err!("`matrix_path` is required"))?;
    let chance = cfg.chance_path.as_deref().ok_or_else(|| input_err!("`chance_path` is required"))?;
    let raw = load_benchmark::<f64, _, _>(open(matrix, "score matrix")?, open(chance, "chance file")?)
        .map_err(|e| input_err!("{}: {e}", matrix.display()))?;
    Ok(normalize_scores(&raw)?)
}

fn invariant(ok: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Internal(msg()))
    }
}

fn seed(cfg: &RunConfig) -> CliResult<u64> {
    cfg.seed.ok_or_else(|| input_err!("`--seed` is required for prowl and pounce"))
}

fn census_table(census: &RelationshipCensus<f64>, ids: &[String]) -> Vec<u8> {
    let mut t = Table::new(&[
        "a", "b", "n_common", "relationship", "family", "direction", "slope", "intercept", "r_squared", "diagnostic",
    ]);
    for ((i, j), v) in &census.verdicts {
        let fit = v.best_fit.as_ref();
        let real = |f: fn(&simba_core::FitResult<f64>) -> f64| fit.map(|x| fmt_real(f(x))).unwrap_or_default();
        t.row(&[
            ids[*i].clone(),
            ids[*j].clone(),
            v.n_common.to_string(),
            v.klass.name().to_string(),
            fit.map(|x| RelationshipClass::from(x.family).name().to_string()).unwrap_or_default(),
            fit.map(|x| x.direction.label().to_string()).unwrap_or_default(),
            real(|x| x.slope),
            real(|x| x.intercept),
            real(|x| x.r_squared),
            v.diagnostic.clone().unwrap_or_default(),
        ]);
    }
    t.finish()
}

pub fn run_stalk(cfg: &RunConfig, bench: &Bench, out: &mut ArtifactSet) -> CliResult<()> {
    let datasets = compare_all_datasets(bench, cfg.r2_threshold)?;
    let models = compare_all_models(bench, cfg.r2_threshold)?;
    let params = json!({ "r2_threshold": json_real(cfg.r2_threshold) });
    out.add("stalk", "dataset_census", "stalk/dataset_census.csv".into(), params.clone(), census_table(&datasets, bench.dataset_ids()));
    out.add("stalk", "model_census", "stalk/model_census.csv".into(), params.clone(), census_table(&models, bench.model_ids()));

    let mut t = Table::new(&["axis", "relationship", "count", "percent"]);
    for (census, n) in [(&datasets, bench.n_datasets()), (&models, bench.n_models())] {
        let total = census.total();
        invariant(total == n * n.saturating_sub(1) / 2, || {
            format!("{} census has {total} pairs for {n} items", census.axis.name())
        })?;
        for class in RelationshipClass::ALL {
            let count = census.count(class);
            let pct = if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 };
            t.row(&[census.axis.name().into(), class.name().into(), count.to_string(), fmt_real(pct)]);
        }
        t.row(&[census.axis.name().into(), "TOTAL".into(), total.to_string(), fmt_real(if total == 0 { 0.0 } else { 100.0 })]);
    }
    out.add("stalk", "census_summary", "stalk/summary.csv".into(), params, t.finish());
    Ok(())
}

fn similarity_table(sim: &SimilarityMatrix<f64>, ids: &[String]) -> Vec<u8> {
    let mut header = vec!["dataset_id"];
    header.extend(ids.iter().map(String::as_str));
    let mut t = Table::new(&header);
    for (i, id) in ids.iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend(sim.row(i).iter().map(|&v| fmt_real(v)));
        t.row(&row);
    }
    t.finish()
}

/// Reads a matrix written by [`similarity_table`], checking that its ids
/// match the benchmark's datasets in order.
pub fn read_similarity(path: &Path, measure: Measure, ids: &[String]) -> CliResult<SimilarityMatrix<f64>> {
    let bad = |msg: String| input_err!("{}: {msg}", path.display());
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(open(path, "similarity matrix")?);
    let header: Vec<String> = reader.headers().map_err(|e| bad(e.to_string()))?.iter().skip(1).map(str::to_string).collect();
    if header != ids {
        return Err(bad("dataset ids do not match the benchmark".into()));
    }
    let mut rows = Vec::with_capacity(ids.len());
    for (r, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.get(0) != Some(ids.get(r).map(String::as_str).unwrap_or("")) {
            return Err(bad(format!("row {} is not dataset `{}`", r + 2, ids.get(r).cloned().unwrap_or_default())));
        }
        let values = rec
            .iter()
            .skip(1)
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad(format!("row {}: `{v}` is not a number", r + 2))))
            .collect::<CliResult<Vec<_>>>()?;
        rows.push(values);
    }
    SimilarityMatrix::from_values(measure, &rows).map_err(|e| bad(e.to_string()))
}

fn trace_table(trace: &SelectionTrace<f64>, ids: &[String], subset_len: usize) -> Vec<u8> {
    let mut t = Table::new(&["rank", "dataset_id", "proxy_coverage", "in_subset"]);
    for (k, &j) in trace.order.iter().enumerate() {
        t.row(&[
            (k + 1).to_string(),
            ids[j].clone(),
            trace.deltas.get(k).map(|&d| fmt_real(d)).unwrap_or_default(),
            u8::from(k < subset_len).to_string(),
        ]);
    }
    t.finish()
}

fn order_table(trace: &SelectionTrace<f64>, ids: &[String]) -> Vec<u8> {
    let mut t = Table::new(&["rank", "dataset_id"]);
    for (k, &j) in trace.order.iter().enumerate() {
        t.row(&[(k + 1).to_string(), ids[j].clone()]);
    }
    t.finish()
}

fn curve_table(curve: &CoverageCurve<f64>) -> Vec<u8> {
    let mut t = Table::new(&["size", "eta", "eta_defined"]);
    for (k, &eta) in curve.etas.iter().enumerate() {
        let defined = !curve.undefined_sizes.contains(&(k + 1));
        t.row(&[(k + 1).to_string(), fmt_real(eta), u8::from(defined).to_string()]);
    }
    t.finish()
}

/// Full-length discovery order (the curve needs every size) and the
/// length of its prefix reaching `gamma`.
fn discover(sim: &SimilarityMatrix<f64>, gamma: f64, beam_width: usize) -> CliResult<(SelectionTrace<f64>, usize)> {
    let full = discover_representative(sim, 1.0, beam_width)?;
    invariant(full.len() == sim.dim(), || format!("trace has {} of {} datasets", full.len(), sim.dim()))?;
    let subset = full.prefix_reaching(gamma).len();
    Ok((full, subset))
}

pub fn run_prowl(cfg: &RunConfig, bench: &Bench, out: &mut ArtifactSet) -> CliResult<()> {
    bench.require_complete()?;
    let seed = seed(cfg)?;
    let ids = bench.dataset_ids();
    let d = bench.n_datasets();
    let thr = cfg.coverage_threshold;
    let evaluator = CoverageEvaluator::new(bench)?;
    let random = random_baseline(&evaluator, bench, cfg.random_runs, seed, thr)?;

    let mut summary = Table::new(&[
        "system", "sc_auc", "s_star", "subset_size", "auc_prop", "max2_prop", "undefined_sizes", "flagged_pairs",
    ]);
    let mut rows = 0;
    for &measure in &cfg.measures {
        let (sim, source) = match &cfg.similarity_dir {
            Some(dir) => (
                read_similarity(&dir.join(format!("similarity_{measure}.csv")), measure, ids)?,
                "loaded",
            ),
            None => (similarity_matrix(bench, measure)?, "computed"),
        };
        let (trace, subset) = discover(&sim, cfg.gamma, cfg.beam_width)?;
        let curve = evaluator.curve(&trace)?;
        let vs = proportion_vs_random(&curve, &random.curves, thr);
        let params = json!({
            "measure": measure.name(),
            "gamma": json_real(cfg.gamma),
            "beam_width": cfg.beam_width,
            "source": source,
        });
        out.add("prowl", "similarity", format!("prowl/similarity_{measure}.csv"), params.clone(), similarity_table(&sim, ids));
        out.add("prowl", "trace", format!("prowl/trace_{measure}.csv"), params.clone(), trace_table(&trace, ids, subset));
        out.add("prowl", "coverage_curve", format!("prowl/curve_{measure}.csv"), params, curve_table(&curve));
        summary.row(&[
            measure.name().to_string(),
            fmt_real(curve.sc_auc()),
            curve.smallest_covering_prefix(thr).to_string(),
            subset.to_string(),
            fmt_real(vs.auc_prop),
            fmt_real(vs.max2_prop),
            sizes(&curve.undefined_sizes),
            sim.diagnostics.len().to_string(),
        ]);
        rows += 1;
    }

    for (kind, name) in [(BaselineKind::GreedyMin, "greedy_min"), (BaselineKind::GreedyMax, "greedy_max")] {
        let trace = baseline_order(bench, kind, seed);
        let curve = evaluator.curve(&trace)?;
        let vs = proportion_vs_random(&curve, &random.curves, thr);
        let params = json!({ "baseline": name });
        out.add("prowl", "trace", format!("prowl/trace_{name}.csv"), params.clone(), order_table(&trace, ids));
        out.add("prowl", "coverage_curve", format!("prowl/curve_{name}.csv"), params, curve_table(&curve));
        summary.row(&[
            name.to_string(),
            fmt_real(curve.sc_auc()),
            curve.smallest_covering_prefix(thr).to_string(),
            d.to_string(),
            fmt_real(vs.auc_prop),
            fmt_real(vs.max2_prop),
            sizes(&curve.undefined_sizes),
            String::new(),
        ]);
    }

    let params = json!({ "baseline": "random", "runs": cfg.random_runs, "base_seed": seed });
    let mut runs = Table::new(&["run", "seed", "sc_auc", "s_star"]);
    for (r, c) in random.curves.iter().enumerate() {
        runs.row(&[
            r.to_string(),
            seed.wrapping_add(r as u64).to_string(),
            fmt_real(c.sc_auc()),
            c.smallest_covering_prefix(thr).to_string(),
        ]);
    }
    let mut mean = Table::new(&["size", "eta"]);
    for (k, &eta) in random.mean_etas.iter().enumerate() {
        mean.row(&[(k + 1).to_string(), fmt_real(eta)]);
    }
    out.add("prowl", "random_runs", "prowl/random_runs.csv".into(), params.clone(), runs.finish());
    out.add("prowl", "coverage_curve", "prowl/curve_random_mean.csv".into(), params, mean.finish());
    summary.row(&[
        "random".to_string(),
        fmt_real(random.mean_sc_auc),
        fmt_real(random.mean_s_star),
        d.to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
    ]);

    invariant(rows == cfg.measures.len(), || "prowl summary is missing measures".into())?;
    let params = json!({
        "coverage_threshold": json_real(thr),
        "measures": cfg.measures.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "random_runs": cfg.random_runs,
    });
    out.add("prowl", "summary", "prowl/summary.csv".into(), params, summary.finish());
    Ok(())
}

fn sizes(v: &[usize]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn spec_for(cfg: &RunConfig, kind: PredictorKind, seed: u64) -> PredictorSpec<f64> {
    PredictorSpec {
        ridge_lambda: cfg.ridge_lambda,
        knn_k: cfg.knn_k,
        mlp_training: MlpTraining {
            learning_rate: cfg.mlp_learning_rate,
            max_iterations: cfg.mlp_max_iterations,
            min_improvement: cfg.mlp_min_improvement,
        },
        ..PredictorSpec::new(kind, seed)
    }
}

fn spec_params(cfg: &RunConfig, kind: PredictorKind) -> Value {
    let mut p = json!({ "predictor": kind.name() });
    let m = p.as_object_mut().expect("object");
    match kind {
        PredictorKind::Ridge => {
            m.insert("ridge_lambda".into(), json_real(cfg.ridge_lambda));
        }
        PredictorKind::Knn => {
            m.insert("knn_k".into(), json!(cfg.knn_k));
        }
        PredictorKind::Mlp1 | PredictorKind::Mlp2 => {
            m.insert("hidden_layers".into(), json!(kind.hidden_layers()));
            m.insert("learning_rate".into(), json_real(cfg.mlp_learning_rate));
            m.insert("max_iterations".into(), json!(cfg.mlp_max_iterations));
            m.insert("min_improvement".into(), json_real(cfg.mlp_min_improvement));
        }
    }
    p
}

pub fn run_pounce(cfg: &RunConfig, bench: &Bench, out: &mut ArtifactSet) -> CliResult<()> {
    bench.require_complete()?;
    let seed = seed(cfg)?;
    let ids = bench.dataset_ids();
    let split = split_models(bench, cfg.split_ratio, seed)?;
    if cfg.k_folds > split.train.n_models() {
        return Err(input_err!(
            "`k_folds` = {} exceeds the {} training models",
            cfg.k_folds,
            split.train.n_models()
        ));
    }

    let mut t = Table::new(&["model_id", "role", "split_seed"]);
    for (half, role) in [(&split.train, "train"), (&split.test, "test")] {
        for id in half.model_ids() {
            t.row(&[id.clone(), role.to_string(), seed.to_string()]);
        }
    }
    let split_params = json!({ "split_ratio": json_real(cfg.split_ratio), "seed": seed,
        "n_train": split.train.n_models(), "n_test": split.test.n_models() });
    out.add("pounce", "split", "pounce/split.csv".into(), split_params, t.finish());

    let sim = similarity_matrix(&split.train, cfg.pounce_measure)?;
    let (trace, subset) = discover(&sim, cfg.subset_coverage, cfg.beam_width)?;
    let trace_params = json!({
        "measure": cfg.pounce_measure.name(),
        "subset_coverage": json_real(cfg.subset_coverage),
        "beam_width": cfg.beam_width,
        "models": "train",
    });
    out.add("pounce", "trace", "pounce/trace.csv".into(), trace_params, trace_table(&trace, ids, subset));

    let mut summary = Table::new(&["predictor", "sigma", "auc_mse", "subset_size", "mse_at_subset"]);
    let mut rows = 0;
    for &kind in &cfg.predictors {
        let spec = spec_for(cfg, kind, seed);
        for &sigma in &cfg.noise_sigmas {
            let noise = Noise { mean: cfg.noise_mean, sigma, seed };
            let curve = mse_curve_with_noise(&split, &trace, &spec, noise)?;
            let mut c = Table::new(&["size", "mse"]);
            for (&size, &mse) in curve.sizes.iter().zip(&curve.mses) {
                c.row(&[size.to_string(), fmt_real(mse)]);
            }
            let mut params = spec_params(cfg, kind);
            let m = params.as_object_mut().expect("object");
            m.insert("sigma".into(), json_real(sigma));
            m.insert("noise_mean".into(), json_real(cfg.noise_mean));
            m.insert("seed".into(), json!(seed));
            out.add("pounce", "mse_curve", format!("pounce/mse_{kind}_sigma{sigma}.csv"), params, c.finish());
            summary.row(&[
                kind.name().to_string(),
                fmt_real(sigma),
                fmt_real(auc_mse(&curve)),
                subset.to_string(),
                curve.at_size(subset).map(fmt_real).unwrap_or_default(),
            ]);
            rows += 1;
        }
    }
    invariant(rows == cfg.predictors.len() * cfg.noise_sigmas.len(), || {
        "pounce summary does not cover every predictor and sigma".into()
    })?;
    let params = json!({
        "measure": cfg.pounce_measure.name(),
        "predictors": cfg.predictors.iter().map(|k| k.name()).collect::<Vec<_>>(),
        "noise_sigmas": cfg.noise_sigmas.iter().map(|&s| json_real(s)).collect::<Vec<_>>(),
    });
    out.add("pounce", "summary", "pounce/summary.csv".into(), params, summary.finish());

    let mut folds = Table::new(&["predictor", "fold", "auc_mse"]);
    let mut stats = Table::new(&["predictor", "k_folds", "mean", "std_dev"]);
    for &kind in &cfg.predictors {
        let report = kfold_stability(&split.train, &trace, &spec_for(cfg, kind, seed), cfg.k_folds)?;
        for (f, v) in report.per_fold.iter().enumerate() {
            folds.row(&[kind.name().to_string(), f.to_string(), fmt_real(*v)]);
        }
        stats.row(&[
            kind.name().to_string(),
            cfg.k_folds.to_string(),
            fmt_real(report.mean),
            fmt_real(report.std_dev),
        ]);
    }
    let params = json!({ "k_folds": cfg.k_folds, "seed": seed, "models": "train" });
    out.add("pounce", "kfold", "pounce/kfold.csv".into(), params.clone(), folds.finish());
    out.add("pounce", "kfold_summary", "pounce/kfold_summary.csv".into(), params, stats.finish());
    Ok(())
}

/// Everything a run produced, ready to be written.
pub struct RunOutput {
    pub artifacts: ArtifactSet,
    pub manifest: Vec<u8>,
}

pub fn config_json(cfg: &RunConfig) -> Value {
    let map = KEYS
        .iter()
        .map(|&k| (k.to_string(), Value::String(cfg.value_of(k))))
        .collect();
    Value::Object(map)
}

/// Runs `phases` in order and collects their artifacts.
pub fn run_phases(cfg: &RunConfig, phases: &[Phase]) -> CliResult<RunOutput> {
    cfg.validate(phases)?;
    let bench = load(cfg)?;
    let mut artifacts = ArtifactSet::default();
    for phase in phases {
        match phase {
            Phase::Stalk => run_stalk(cfg, &bench, &mut artifacts)?,
            Phase::Prowl => run_prowl(cfg, &bench, &mut artifacts)?,
            Phase::Pounce => run_pounce(cfg, &bench, &mut artifacts)?,
        }
    }
    let mut config = config_json(cfg);
    config
        .as_object_mut()
        .expect("object")
        .insert("run_phases".into(), json!(phases.iter().map(|p| p.name()).collect::<Vec<_>>()));
    let manifest = artifacts.manifest(config);
    Ok(RunOutput { artifacts, manifest })
}

/// Runs and writes; returns the written paths.
pub fn execute(cfg: &RunConfig, phases: &[Phase]) -> CliResult<Vec<PathBuf>> {
    let out = run_phases(cfg, phases)?;
    let dir = cfg.output_dir.as_deref().expect("validated");
    out.artifacts.write(dir, &out.manifest)
}
