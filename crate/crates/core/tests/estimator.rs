mod common;

use proptest::prelude::*;
use rand::Rng;
use sdsbm_core::estimator::{
    default_bandwidth, dissimilarity_all, estimate, gram, gram_with, neighborhoods, quantile_rank, row_squared_errors,
    smooth, Convention, GramStrategy,
};
use sdsbm_core::harness::{sample_replicate, ScenarioKind, ScenarioSpec};
use sdsbm_core::graph_model::build_probability_matrix;
use sdsbm_core::rng::stream;

#[test]
fn gram_matches_triple_loop() {
    let mut rng = stream(40, 0);
    let rows = common::random_dense(40, 0.3, &mut rng);
    let a = common::adjacency(&rows);
    let expected = common::brute_gram(&rows);
    for strategy in [GramStrategy::Bitset, GramStrategy::Sparse, GramStrategy::Auto] {
        let g = gram_with(&a, strategy).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                assert_eq!(g.count(i, j) as u64, expected[i][j]);
            }
        }
    }
}

#[test]
fn dissimilarity_matches_definition_on_n40() {
    let mut rng = stream(41, 0);
    let rows = common::random_dense(40, 0.4, &mut rng);
    let d = dissimilarity_all(&common::adjacency(&rows)).unwrap();
    let brute = common::brute_dissimilarity(&rows);
    for i in 0..40 {
        for j in 0..40 {
            assert_eq!(d.raw(i, j) as u64, brute[i][j]);
            assert!((d.value(i, j) - brute[i][j] as f64 / 40.0).abs() < 1e-12);
        }
    }
}

#[test]
fn three_node_example() {
    let rows = vec![vec![0, 1, 1], vec![0, 0, 1], vec![1, 1, 0]];
    let d = dissimilarity_all(&common::adjacency(&rows)).unwrap();
    assert_eq!(d.raw(0, 1), 1);
    assert_eq!(d.value(0, 1), 1.0 / 3.0);
    assert_eq!(d.with_convention(Convention::Raw).value(0, 1), 1.0);
}

#[test]
fn complete_graph_on_four_nodes() {
    let rows: Vec<Vec<u8>> = (0..4).map(|i| (0..4).map(|j| u8::from(i != j)).collect()).collect();
    let a = common::adjacency(&rows);
    // Every dissimilarity is 0, so the tie rule pulls all three other
    // nodes into each neighbourhood.
    let est = estimate(&a, Some(0.5)).unwrap();
    assert_eq!(est.neighborhood_sizes(), &[3, 3, 3, 3]);
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i == j { 1.0 } else { 2.0 / 3.0 };
            assert!((est.matrix()[(i, j)] - expected).abs() < 1e-15);
        }
    }
}

#[test]
fn default_bandwidth_at_hundred() {
    let h = default_bandwidth(100, 1.0);
    assert!((h - 0.2146).abs() < 1e-4);
    assert_eq!(quantile_rank(h, 100), 22);
}

#[test]
fn single_replicate_error_is_small() {
    let spec = ScenarioSpec::new(ScenarioKind::DiagDominant, true);
    let (labels, a) = sample_replicate(&spec, 400, 2024).unwrap();
    let p = build_probability_matrix(&labels, &spec.block(400).unwrap()).unwrap();
    let est = estimate(&a, None).unwrap();
    let errs = row_squared_errors(p.matrix(), est.matrix()).unwrap();
    let worst = errs.iter().map(|e| e / 400.0).fold(0.0, f64::max);
    assert!(worst <= 0.05, "max row error {worst}");
}

/// Naive smoothing: average the listed neighbour rows entry by entry.
fn brute_smooth(rows: &[Vec<u8>], members: &[usize]) -> Vec<f64> {
    let n = rows.len();
    (0..n)
        .map(|j| members.iter().map(|&m| rows[m][j] as f64).sum::<f64>() / members.len() as f64)
        .collect()
}

#[test]
fn dissimilarity_rejects_tiny_graphs() {
    let rows = vec![vec![0, 1], vec![1, 0]];
    assert!(dissimilarity_all(&common::adjacency(&rows)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dissimilarity_is_symmetric_with_zero_diagonal(seed in any::<u64>(), n in 3usize..30, p in 0.0f64..1.0) {
        let rows = common::random_dense(n, p, &mut stream(seed, 0));
        let d = dissimilarity_all(&common::adjacency(&rows)).unwrap();
        for i in 0..n {
            prop_assert_eq!(d.raw(i, i), 0);
            for j in 0..n {
                prop_assert_eq!(d.raw(i, j), d.raw(j, i));
            }
        }
    }

    #[test]
    fn raw_and_normalized_neighborhoods_agree(seed in any::<u64>(), n in 3usize..40, h in 0.01f64..0.99) {
        let rows = common::random_dense(n, 0.5, &mut stream(seed, 0));
        let d = dissimilarity_all(&common::adjacency(&rows)).unwrap();
        let norm = neighborhoods(&d, h).unwrap();
        let raw = neighborhoods(&d.with_convention(Convention::Raw), h).unwrap();
        prop_assert_eq!(norm, raw);
    }

    #[test]
    fn neighborhoods_meet_quantile_size(seed in any::<u64>(), n in 3usize..60, h in 0.001f64..0.999) {
        let rows = common::random_dense(n, 0.3, &mut stream(seed, 0));
        let d = dissimilarity_all(&common::adjacency(&rows)).unwrap();
        let hoods = neighborhoods(&d, h).unwrap();
        let need = (h * (n - 1) as f64).ceil() as usize;
        for i in 0..n {
            let m = hoods.members(i);
            prop_assert!(m.len() >= need);
            prop_assert!(!m.contains(&i));
            // Everything at or below the largest included distance is in.
            let worst = m.iter().map(|&j| d.raw(i, j)).max().unwrap();
            for j in (0..n).filter(|&j| j != i) {
                prop_assert_eq!(m.contains(&j), d.raw(i, j) <= worst);
            }
        }
    }

    #[test]
    fn smoothing_matches_naive_average(seed in any::<u64>(), n in 3usize..25, h in 0.05f64..0.95) {
        let mut rng = stream(seed, 0);
        let p: f64 = rng.random_range(0.1..0.9);
        let rows = common::random_dense(n, p, &mut rng);
        let a = common::adjacency(&rows);
        let hoods = neighborhoods(&dissimilarity_all(&a).unwrap(), h).unwrap();
        let est = smooth(&a, &hoods).unwrap();
        for i in 0..n {
            let expect = brute_smooth(&rows, hoods.members(i));
            for j in 0..n {
                prop_assert!((est.matrix()[(i, j)] - expect[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gram_strategies_agree(seed in any::<u64>(), n in 2usize..150, p in 0.0f64..1.0) {
        let rows = common::random_dense(n, p, &mut stream(seed, 0));
        let a = common::adjacency(&rows);
        let x = gram_with(&a, GramStrategy::Bitset).unwrap();
        let y = gram_with(&a, GramStrategy::Sparse).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(&x, &gram(&a).unwrap());
    }
}
