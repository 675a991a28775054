mod common;

use rand::Rng;
use simba_core::perfpredict::subset_mse;
use simba_core::{
    kfold_stability, mse_curve, predict_scores, split_models, train_predictor, Benchmark, Matrix,
    PredictorKind, PredictorSpec, SelectionMethod, SelectionTrace,
};

fn identity_trace(d: usize) -> SelectionTrace<f64> {
    SelectionTrace {
        order: (0..d).collect(),
        deltas: Vec::new(),
        method: SelectionMethod::Greedy,
    }
}

/// Simple regression through the normal equations.
fn ols_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[test]
fn ridge_recovers_planted_map_on_held_out_models() {
    let mut r = common::rng(77);
    let s: Vec<f64> = (0..7).map(|_| r.random_range(0.1..0.9)).collect();
    let targets = |v: f64| vec![0.1 + 0.5 * v, 0.8 - 0.6 * v];
    let x = Matrix::from_rows(&s[..5].iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap();
    let y = Matrix::from_rows(&s[..5].iter().map(|&v| targets(v)).collect::<Vec<_>>()).unwrap();
    let q = Matrix::from_rows(&s[5..].iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap();
    let truth = Matrix::from_rows(&s[5..].iter().map(|&v| targets(v)).collect::<Vec<_>>()).unwrap();

    let pred = train_predictor(&x, &y, &PredictorSpec::ridge(1e-10)).unwrap();
    let out = predict_scores(&pred, &q).unwrap();
    assert!(out.mse(&truth).unwrap() <= 1e-8);

    for c in 0..2 {
        let (slope, intercept) = ols_line(&x.column(0), &y.column(c));
        for row in 0..2 {
            let want = (intercept + slope * q.get(row, 0)).clamp(0.0, 1.0);
            assert!((out.get(row, c) - want).abs() < 1e-8);
        }
    }
}

#[test]
fn knn_two_neighbour_average() {
    let x = Matrix::<f64>::from_rows(&[vec![0.2], vec![0.6], vec![0.95]]).unwrap();
    let y = Matrix::from_rows(&[vec![0.2], vec![0.6], vec![0.0]]).unwrap();
    let pred = train_predictor(&x, &y, &PredictorSpec::knn(2)).unwrap();
    let out = predict_scores(&pred, &Matrix::from_rows(&[vec![0.4]]).unwrap()).unwrap();
    assert!((out.get(0, 0) - 0.4).abs() < 1e-15);
}

#[test]
fn planted_linear_benchmark_is_exact_at_every_size() {
    let b = common::planted_linear(20, 6, 3);
    let split = split_models(&b, 0.8, 4).unwrap();
    let spec = PredictorSpec::ridge(1e-10);
    let curve = mse_curve(&split, &identity_trace(6), &spec).unwrap();
    assert_eq!(curve.sizes, (1..=5).collect::<Vec<_>>());
    assert!(curve.mses.iter().all(|&v| v <= 1e-8), "{:?}", curve.mses);
    let train = common::dense(&split.train);
    let test = common::dense(&split.test);
    let at_end = subset_mse(&train, &test, &(0..6).collect::<Vec<_>>(), 5, &spec).unwrap();
    assert_eq!(at_end, curve.mses[4]);
}

#[test]
fn planted_linear_folds_agree() {
    let b = common::planted_linear(25, 6, 8);
    let split = split_models(&b, 0.8, 1).unwrap();
    let report = kfold_stability(&split.train, &identity_trace(6), &PredictorSpec::ridge(1e-10), 5)
        .unwrap();
    assert_eq!(report.per_fold.len(), 5);
    assert!(report.std_dev < 1e-6, "{report:?}");
}

#[test]
fn duplicated_models_have_identical_folds() {
    let row = vec![0.3, 0.55, 0.7, 0.2];
    let b = Benchmark::from_rows(&vec![row; 10]).unwrap();
    for kind in [PredictorKind::Ridge, PredictorKind::Knn] {
        let report =
            kfold_stability(&b, &identity_trace(4), &PredictorSpec::new(kind, 5), 5).unwrap();
        assert!(report.std_dev < 1e-12, "{kind}: {report:?}");
        let first = report.per_fold[0];
        assert!(report.per_fold.iter().all(|&v| (v - first).abs() < 1e-12));
    }
}

#[test]
fn predictions_are_deterministic() {
    let b = common::random_bench(12, 5, 4);
    let split = split_models(&b, 0.75, 2).unwrap();
    for kind in PredictorKind::ALL {
        let spec = PredictorSpec::new(kind, 31);
        let a = mse_curve(&split, &identity_trace(5), &spec).unwrap();
        let c = mse_curve(&split, &identity_trace(5), &spec).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.mses), bits(&c.mses), "{kind}");
    }
}
