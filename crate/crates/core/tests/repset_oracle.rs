mod common;

use common::{brute_delta, brute_mwr, brute_pearson, combinations};
use simba_core::repset::DEFAULT_COVERAGE_THRESHOLD;
use simba_core::{
    coverage, coverage_gain, discover_representative, mean_win_rate, proxy_coverage,
    similarity_matrix, CoverageEvaluator, Matrix, Measure, SimilarityMatrix,
};

fn hand_matrix() -> SimilarityMatrix<f64> {
    SimilarityMatrix::from_values(
        Measure::Pearson,
        &[
            vec![1.0, 0.8, 0.4],
            vec![0.8, 1.0, 0.3],
            vec![0.4, 0.3, 1.0],
        ],
    )
    .unwrap()
}

#[test]
fn hand_matrix_delta() {
    let s = hand_matrix();
    let d = proxy_coverage(&[0], &s).unwrap();
    assert!((d - (1.0 + 0.8 + 0.4) / 3.0).abs() < 1e-15);
}

#[test]
fn hand_matrix_gains_match_exhaustive_delta() {
    let s = hand_matrix();
    for cand in [1, 2] {
        let want = brute_delta(&[0, cand], &s) - brute_delta(&[0], &s);
        assert!((coverage_gain(&[0], cand, &s).unwrap() - want).abs() < 1e-15);
    }
    assert!(coverage_gain(&[0], 2, &s).unwrap() > coverage_gain(&[0], 1, &s).unwrap());
}

/// Similarity matrix with one block per label: 1 on the diagonal, `within` inside a
/// block, `across` between blocks.
fn block_matrix(labels: &[usize], within: f64, across: f64, jitter: f64) -> SimilarityMatrix<f64> {
    let d = labels.len();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| match (i == j, labels[i] == labels[j]) {
                    (true, _) => 1.0,
                    (false, true) => within - jitter * ((i + j) % 3) as f64,
                    (false, false) => across + jitter * ((i * j) % 5) as f64,
                })
                .collect()
        })
        .collect();
    SimilarityMatrix::from_values(Measure::Pearson, &rows).unwrap()
}

#[test]
fn planted_blocks_first_picks_are_optimal() {
    let labels = [0, 1, 2, 0, 1, 2, 2, 0, 1];
    let s = block_matrix(&labels, 0.98, 0.1, 0.001);
    let trace = discover_representative(&s, 0.95, 1).unwrap();
    let first: Vec<usize> = trace.order[..3].to_vec();
    let mut clusters: Vec<usize> = first.iter().map(|&i| labels[i]).collect();
    clusters.sort();
    assert_eq!(clusters, vec![0, 1, 2]);
    let best = combinations(9, 3)
        .into_iter()
        .map(|c| brute_delta(&c, &s))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((brute_delta(&first, &s) - best).abs() < 1e-12);
}

#[test]
fn beam_reproduces_greedy_on_planted_blocks() {
    let labels = [0, 1, 2, 0, 1, 2, 2, 0, 1];
    let s = block_matrix(&labels, 0.98, 0.1, 0.0);
    let greedy = discover_representative(&s, 1.0, 1).unwrap();
    let beam = discover_representative(&s, 1.0, 5).unwrap();
    assert_eq!(greedy.len(), 9);
    assert_eq!(beam.len(), 9);
    // greedy is optimal at every size on this instance
    for k in 1..=9 {
        let best = combinations(9, k)
            .into_iter()
            .map(|c| brute_delta(&c, &s))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((greedy.deltas[k - 1] - best).abs() < 1e-12, "size {k}");
        assert!((beam.deltas[k - 1] - greedy.deltas[k - 1]).abs() < 1e-12, "size {k}");
    }
}

#[test]
fn deltas_and_gains_match_brute_force_on_random_instances() {
    for seed in 0..20 {
        let d = 3 + seed as usize % 6;
        let s = common::random_similarity(d, seed);
        for k in 0..=d {
            for subset in combinations(d, k) {
                let got = proxy_coverage(&subset, &s).unwrap();
                assert!((got - brute_delta(&subset, &s)).abs() <= 1e-12);
                for cand in 0..d {
                    let mut with = subset.clone();
                    if !with.contains(&cand) {
                        with.push(cand);
                    }
                    let want = brute_delta(&with, &s) - brute_delta(&subset, &s);
                    assert!((coverage_gain(&subset, cand, &s).unwrap() - want).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn three_by_two_win_rates() {
    let scores = Matrix::from_rows(&[vec![0.9, 0.1], vec![0.5, 0.5], vec![0.5, 0.8]]).unwrap();
    let mwr = mean_win_rate(&scores).unwrap();
    let want = brute_mwr(&scores, &[0, 1]);
    assert_eq!(mwr, want);
    assert_eq!(want, vec![0.5, 0.25, 0.5]);
}

#[test]
fn eta_matches_pearson_over_brute_mwr() {
    for seed in 0..20 {
        let m = 4 + seed as usize % 9;
        let d = 3 + seed as usize % 6;
        let b = common::random_bench(m, d, 500 + seed);
        let dense = common::dense(&b);
        let full = brute_mwr(&dense, &(0..d).collect::<Vec<_>>());
        let ev = CoverageEvaluator::new(&b).unwrap();
        for k in 1..=d {
            for subset in combinations(d, k) {
                let want = brute_pearson(&full, &brute_mwr(&dense, &subset));
                let got = ev.coverage(&subset).unwrap();
                match (got, want) {
                    (Some(g), Some(w)) => assert!((g - w).abs() <= 1e-10),
                    (g, w) => assert_eq!(g.is_none(), w.is_none()),
                }
            }
        }
    }
}

#[test]
fn planted_clusters_are_covered_once_represented() {
    let (b, labels) = common::planted_clusters(3, 4, 15, 9);
    let s = similarity_matrix(&b, Measure::Pearson).unwrap();
    let trace = discover_representative(&s, 1.0, 1).unwrap();
    let mut picked: Vec<usize> = trace.order[..3].iter().map(|&j| labels[j]).collect();
    picked.sort();
    assert_eq!(picked, vec![0, 1, 2]);
    let eta = coverage(&b, &trace.order[..3]).unwrap().unwrap();
    let dense = common::dense(&b);
    let full = brute_mwr(&dense, &(0..labels.len()).collect::<Vec<_>>());
    let oracle = brute_pearson(&full, &brute_mwr(&dense, &trace.order[..3])).unwrap();
    assert!((eta - oracle).abs() < 1e-10);
    assert!(eta >= DEFAULT_COVERAGE_THRESHOLD);
}
