mod common;

use rand::Rng;
use simba_core::relate::{Direction, LOG_OFFSET};
use simba_core::{
    classify_relationship, compare_all_datasets, fit_pair_regression, Benchmark, Family,
    RelationshipClass,
};

/// Closed-form simple regression: (slope, intercept, r²).
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let my = sy / n;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    (slope, intercept, 1.0 - ss_res / ss_tot)
}

fn ln(v: &[f64]) -> Vec<f64> {
    v.iter().map(|a| (a + LOG_OFFSET).ln()).collect()
}

/// All six r² values: three families, both directions.
fn six_r2(x: &[f64], y: &[f64]) -> [f64; 6] {
    [
        ols(x, y).2,
        ols(y, x).2,
        ols(x, &ln(y)).2,
        ols(y, &ln(x)).2,
        ols(&ln(x), &ln(y)).2,
        ols(&ln(y), &ln(x)).2,
    ]
}

#[test]
fn exponential_fit_matches_closed_form() {
    let x: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
    let y: Vec<f64> = x.iter().map(|v| (2.0 * v).exp()).collect();
    let fit = fit_pair_regression(&x, &y, Family::Exponential).unwrap();
    let (slope, intercept, r2) = ols(&x, &ln(&y));
    assert!((fit.r_squared - 1.0).abs() < 1e-9);
    assert!((fit.r_squared - r2).abs() < 1e-9);
    assert!((fit.slope - slope).abs() < 1e-9);
    assert!((fit.intercept - intercept).abs() < 1e-9);
    assert!((fit.slope - 2.0).abs() < 1e-5);
}

#[test]
fn independent_noise_is_unrelated() {
    let mut r = common::rng(2024);
    let x: Vec<f64> = (0..20).map(|_| r.random_range(0.0..1.0)).collect();
    let y: Vec<f64> = (0..20).map(|_| r.random_range(0.0..1.0)).collect();
    let best = six_r2(&x, &y).into_iter().fold(f64::NEG_INFINITY, f64::max);
    assert!(best < 0.5, "oracle max r² {best}");
    let v = classify_relationship(&x, &y, 0.5);
    assert_eq!(v.klass, RelationshipClass::None);
    assert_eq!(v.n_common, 20);
}

#[test]
fn power_law_beats_other_families() {
    let x: Vec<f64> = (1..=15).map(|i| i as f64 / 15.0).collect();
    let y: Vec<f64> = x.iter().map(|v| v.powf(1.7)).collect();
    let r2 = six_r2(&x, &y);
    let power = r2[4].max(r2[5]);
    assert!((power - 1.0).abs() < 1e-6);
    assert!(r2[..4].iter().all(|&v| v < power));
    let v = classify_relationship(&x, &y, 0.5);
    assert_eq!(v.klass, RelationshipClass::PowerLaw);
    let fit = v.best_fit.unwrap();
    assert_eq!(fit.family, Family::PowerLaw);
    assert!((fit.r_squared - power).abs() < 1e-9);
}

#[test]
fn reverse_direction_is_reported() {
    let x: Vec<f64> = (1..=12).map(|i| i as f64 / 12.0).collect();
    let y: Vec<f64> = x.iter().map(|v| (v / 2.0).ln() + 1.0).collect();
    // x = 2 exp(y - 1): exponential when regressing x on y
    let v = classify_relationship(&x, &y, 0.5);
    assert_eq!(v.klass, RelationshipClass::Exponential);
    assert_eq!(v.best_fit.unwrap().direction, Direction::Backward);
}

#[test]
fn census_agrees_with_pairwise_oracle() {
    let b = common::random_bench(15, 6, 11);
    let census = compare_all_datasets(&b, 0.5).unwrap();
    assert_eq!(census.total(), 15);
    for ((i, j), verdict) in &census.verdicts {
        let x: Vec<f64> = b.column(*i).into_iter().map(Option::unwrap).collect();
        let y: Vec<f64> = b.column(*j).into_iter().map(Option::unwrap).collect();
        let best = six_r2(&x, &y).into_iter().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(verdict.klass == RelationshipClass::None, best < 0.5, "pair {i},{j}");
        if let Some(fit) = verdict.best_fit {
            assert!((fit.r_squared - best).abs() < 1e-9);
        }
    }
}

#[test]
fn missing_cells_use_pairwise_complete_rows() {
    let grid = vec![
        vec![Some(0.1), Some(0.2), None],
        vec![Some(0.3), Some(0.6), Some(0.5)],
        vec![Some(0.5), Some(1.0), Some(0.1)],
        vec![Some(0.7), None, Some(0.9)],
    ];
    let ids = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let b = Benchmark::new(ids("m", 4), ids("d", 3), grid).unwrap();
    let census = compare_all_datasets(&b, 0.5).unwrap();
    let v01 = &census.verdicts[&(0, 1)];
    assert_eq!(v01.n_common, 3);
    assert_eq!(v01.klass, RelationshipClass::Linear);
    let v12 = &census.verdicts[&(1, 2)];
    assert_eq!(v12.n_common, 2);
    assert_eq!(v12.klass, RelationshipClass::None);
    assert!(v12.diagnostic.is_some());
}
