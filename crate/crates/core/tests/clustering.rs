mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use sdsbm_core::clustering::{kmeans, kmp_pipeline, objective, KMeansOptions, Seeding};
use sdsbm_core::metrics::{ari, exact_recovery};
use sdsbm_core::rng::stream;
use sdsbm_core::DenseMatrix;

fn mean_centroids(rows: &DenseMatrix, labels: &[usize], k: usize) -> DenseMatrix {
    let mut c = DenseMatrix::zeros(k, rows.cols());
    let mut sizes = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        sizes[l] += 1;
        for (x, &v) in c.row_mut(l).iter_mut().zip(rows.row(i)) {
            *x += v;
        }
    }
    for (l, &s) in sizes.iter().enumerate() {
        c.row_mut(l).iter_mut().for_each(|x| *x /= s as f64);
    }
    c
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Noisy blobs: `k` random centres in `[0, 10]^dim`, each row a centre plus
/// uniform noise of half-width `noise`.
fn blobs(n: usize, k: usize, dim: usize, noise: f64, rng: &mut impl Rng) -> (DenseMatrix, Vec<usize>) {
    let centres: Vec<Vec<f64>> = (0..k).map(|_| (0..dim).map(|_| rng.random_range(0.0..10.0)).collect()).collect();
    let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&l| centres[l].iter().map(|c| c + rng.random_range(-noise..noise)).collect())
        .collect();
    (DenseMatrix::from_rows(&rows).unwrap(), labels)
}

#[test]
fn toy_matches_best_two_partition() {
    let rows = DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]]).unwrap();
    // Every labelling of the four points with both groups non-empty.
    let mut best = (f64::INFINITY, 0u32);
    for mask in 1u32..15 {
        let labels: Vec<usize> = (0..4).map(|i| ((mask >> i) & 1) as usize).collect();
        let c = mean_centroids(&rows, &labels, 2);
        let obj: f64 = (0..4).map(|i| sq(rows.row(i), c.row(labels[i]))).sum();
        if obj < best.0 {
            best = (obj, mask);
        }
    }
    assert_eq!(best.0, 1.0);
    let res = kmeans(&rows, 2, &KMeansOptions::default(), &mut stream(8, 0)).unwrap();
    assert_eq!(res.objective, best.0);
    let want: Vec<usize> = (0..4).map(|i| ((best.1 >> i) & 1) as usize).collect();
    assert!(exact_recovery(&want, res.labels.as_slice(), 2).unwrap());
}

#[test]
fn rejects_bad_k_and_options() {
    let rows = DenseMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
    let opts = KMeansOptions::default();
    assert!(kmeans(&rows, 3, &opts, &mut stream(0, 0)).is_err());
    assert!(kmeans(&rows, 0, &opts, &mut stream(0, 0)).is_err());
    let bad = KMeansOptions { restarts: 0, ..opts };
    assert!(kmeans(&rows, 1, &bad, &mut stream(0, 0)).is_err());
}

#[test]
fn same_seed_same_result() {
    let (rows, _) = blobs(90, 3, 4, 2.0, &mut stream(1, 0));
    let a = kmeans(&rows, 3, &KMeansOptions::default(), &mut stream(2, 0)).unwrap();
    let b = kmeans(&rows, 3, &KMeansOptions::default(), &mut stream(2, 0)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn noiseless_block_probabilities() {
    let mut rng = stream(12, 0);
    for _ in 0..20 {
        let k = rng.random_range(2..=6);
        let n = rng.random_range(2 * k..60);
        let mut truth: Vec<usize> = (0..n).map(|i| i % k).collect();
        truth.shuffle(&mut rng);
        let base: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| base[truth[i]][truth[j]]).collect()).collect();
        let rows = DenseMatrix::from_rows(&rows).unwrap();
        for seeding in [Seeding::PlusPlus, Seeding::Random] {
            let opts = KMeansOptions { seeding, ..KMeansOptions::default() };
            let res = kmeans(&rows, k, &opts, &mut rng).unwrap();
            assert_eq!(res.objective, 0.0);
            assert!(exact_recovery(&truth, res.labels.as_slice(), k).unwrap());
        }
    }
}

#[test]
fn kmp_is_reproducible() {
    let rows = common::random_dense(60, 0.3, &mut stream(3, 0));
    let a = common::adjacency(&rows);
    let opts = KMeansOptions::default();
    let x = kmp_pipeline(&a, 3, None, &opts, &mut stream(4, 0)).unwrap();
    let y = kmp_pipeline(&a, 3, None, &opts, &mut stream(4, 0)).unwrap();
    assert_eq!(x, y);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn history_never_increases(seed in any::<u64>(), n in 4usize..80, k in 1usize..6, noise in 0.1f64..8.0) {
        let k = k.min(n);
        let mut rng = stream(seed, 0);
        let (rows, _) = blobs(n, k, 3, noise, &mut rng);
        let res = kmeans(&rows, k, &KMeansOptions::default(), &mut rng).unwrap();
        for w in res.objective_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} then {}", w[0], w[1]);
        }
        prop_assert_eq!(*res.objective_history.last().unwrap(), res.objective);
    }

    #[test]
    fn result_invariants(seed in any::<u64>(), n in 2usize..80, k in 1usize..8) {
        let k = k.min(n);
        let mut rng = stream(seed, 0);
        let (rows, _) = blobs(n, k.max(2), 3, 3.0, &mut rng);
        let res = kmeans(&rows, k, &KMeansOptions::default(), &mut rng).unwrap();
        let labels = res.labels.as_slice();
        prop_assert!(res.labels.counts().iter().all(|&c| c >= 1));
        let direct: f64 = (0..n).map(|i| sq(rows.row(i), res.centroids.row(labels[i]))).sum();
        prop_assert!((res.objective - direct).abs() <= 1e-9 * direct.max(1.0));
        prop_assert!((objective(&rows, labels, &res.centroids) - res.objective).abs() <= 1e-12 * direct.max(1.0));
        prop_assert!(res.restart_chosen < KMeansOptions::default().restarts);
    }

    #[test]
    fn converged_assignment_is_a_fixed_point(seed in any::<u64>(), n in 3usize..80, k in 2usize..6) {
        let k = k.min(n);
        let mut rng = stream(seed, 0);
        let (rows, _) = blobs(n, k, 2, 4.0, &mut rng);
        // Zero tolerance runs Lloyd until the assignment stops changing.
        let opts = KMeansOptions { tolerance: 0.0, max_iters: 10_000, ..KMeansOptions::default() };
        let res = kmeans(&rows, k, &opts, &mut rng).unwrap();
        prop_assert!(res.iterations_used < opts.max_iters);
        let labels = res.labels.as_slice();
        for i in 0..n {
            let own = sq(rows.row(i), res.centroids.row(labels[i]));
            for c in 0..k {
                prop_assert!(sq(rows.row(i), res.centroids.row(c)) >= own - 1e-9 * own.max(1.0));
            }
        }
    }

    #[test]
    fn beats_planted_partition(seed in any::<u64>(), per in 3usize..20, k in 2usize..6) {
        let mut rng = stream(seed, 0);
        let (rows, truth) = blobs(per * k, k, 4, 0.5, &mut rng);
        let planted = objective(&rows, &truth, &mean_centroids(&rows, &truth, k));
        let res = kmeans(&rows, k, &KMeansOptions::default(), &mut rng).unwrap();
        prop_assert!(res.objective <= planted * (1.0 + 1e-12), "{} > {}", res.objective, planted);
    }

    #[test]
    fn repeated_values_are_recovered(seed in any::<u64>(), k in 2usize..7, extra in 0usize..20) {
        let mut rng = stream(seed, 0);
        let n = 2 * k + extra;
        let mut truth: Vec<usize> = (0..n).map(|i| i % k).collect();
        truth.shuffle(&mut rng);
        let values: Vec<Vec<f64>> = (0..k).map(|c| vec![c as f64, rng.random_range(0.0..1.0)]).collect();
        let rows: Vec<Vec<f64>> = truth.iter().map(|&l| values[l].clone()).collect();
        let rows = DenseMatrix::from_rows(&rows).unwrap();
        let a = kmeans(&rows, k, &KMeansOptions::default(), &mut rng).unwrap();
        let b = kmeans(&rows, k, &KMeansOptions::default(), &mut rng).unwrap();
        prop_assert_eq!(a.objective, 0.0);
        prop_assert_eq!(ari(&truth, a.labels.as_slice()).unwrap(), 1.0);
        prop_assert!(exact_recovery(a.labels.as_slice(), b.labels.as_slice(), k).unwrap());
    }
}
