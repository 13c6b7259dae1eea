mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use sdsbm_core::metrics::{ari, exact_recovery, matched_count, max_weight_assignment, permutation_accuracy, ContingencyTable};
use sdsbm_core::rng::stream;

fn random_labels(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

#[test]
fn independent_halves() {
    let t = [0, 0, 1, 1];
    let p = [0, 1, 0, 1];
    assert_eq!(ari(&t, &p).unwrap(), common::pair_counting_ari(&t, &p));
    assert_eq!(ari(&t, &p).unwrap(), -0.5);
    assert_eq!(permutation_accuracy(&t, &p, 2).unwrap(), 0.5);
}

#[test]
fn identical_and_trivial_partitions() {
    let t = [0, 1, 2, 0, 1, 2];
    assert_eq!(ari(&t, &t).unwrap(), 1.0);
    assert_eq!(ari(&[0, 0, 0], &[0, 0, 0]).unwrap(), 1.0);
    assert!(ari(&[0, 1], &[0]).is_err());
}

#[test]
fn one_flip_in_hundred() {
    let t: Vec<usize> = (0..100).map(|i| i % 3).collect();
    let mut p = t.clone();
    p[17] = (p[17] + 1) % 3;
    assert_eq!(permutation_accuracy(&t, &p, 3).unwrap(), 0.99);
    assert!(!exact_recovery(&t, &p, 3).unwrap());
    let relabeled: Vec<usize> = t.iter().map(|&l| (l + 2) % 3).collect();
    assert!(exact_recovery(&t, &relabeled, 3).unwrap());
}

#[test]
fn contingency_marginals() {
    let t = [0, 0, 1, 2, 2, 2];
    let p = [1, 1, 0, 0, 1, 2];
    let c = ContingencyTable::new(&t, &p).unwrap();
    assert_eq!(c.total(), 6);
    for a in 0..c.rows() {
        assert_eq!(c.row_sums()[a], (0..c.cols()).map(|b| c.count(a, b)).sum::<u64>());
    }
    for b in 0..c.cols() {
        assert_eq!(c.col_sums()[b], (0..c.rows()).map(|a| c.count(a, b)).sum::<u64>());
    }
    assert_eq!(c.count(2, 0), 1);
}

#[test]
fn accuracy_matches_exhaustive_search() {
    let mut rng = stream(3, 0);
    for case in 0..200 {
        let k = 1 + case % 7;
        let n = rng.random_range(k..60);
        let t = random_labels(n, k, &mut rng);
        let p = random_labels(n, k, &mut rng);
        let brute = common::exhaustive_matches(&t, &p, k);
        assert_eq!(matched_count(&t, &p, k).unwrap() as usize, brute);
        assert_eq!(permutation_accuracy(&t, &p, k).unwrap(), brute as f64 / n as f64);
    }
}

#[test]
fn ari_matches_pair_counting() {
    let mut rng = stream(4, 0);
    for _ in 0..200 {
        let n = rng.random_range(2..=30);
        let k = rng.random_range(1..=6);
        let t = random_labels(n, k, &mut rng);
        let p = random_labels(n, rng.random_range(1..=6), &mut rng);
        let got = ari(&t, &p).unwrap();
        let want = common::pair_counting_ari(&t, &p);
        assert_eq!(got, want);
    }
}

#[test]
fn assignment_is_optimal_on_small_matrices() {
    let mut rng = stream(5, 0);
    for k in 1..=6 {
        for _ in 0..20 {
            let w: Vec<Vec<i64>> = (0..k).map(|_| (0..k).map(|_| rng.random_range(0..50)).collect()).collect();
            let assign = max_weight_assignment(&w);
            let mut seen = assign.clone();
            seen.sort();
            assert_eq!(seen, (0..k).collect::<Vec<_>>());
            let got: i64 = (0..k).map(|r| w[r][assign[r]]).sum();
            let mut best = i64::MIN;
            common::for_each_permutation(k, |s| best = best.max((0..k).map(|r| w[r][s[r]]).sum()));
            assert_eq!(got, best);
        }
    }
}

proptest! {
    #[test]
    fn metrics_ignore_pred_relabeling(seed in any::<u64>(), n in 2usize..80, k in 1usize..7) {
        let mut rng = stream(seed, 0);
        let t = random_labels(n, k, &mut rng);
        let p = random_labels(n, k, &mut rng);
        let mut sigma: Vec<usize> = (0..k).collect();
        sigma.shuffle(&mut rng);
        let q: Vec<usize> = p.iter().map(|&l| sigma[l]).collect();
        prop_assert_eq!(ari(&t, &p).unwrap(), ari(&t, &q).unwrap());
        prop_assert_eq!(permutation_accuracy(&t, &p, k).unwrap(), permutation_accuracy(&t, &q, k).unwrap());
    }

    #[test]
    fn exact_implies_unit_ari(seed in any::<u64>(), n in 2usize..80, k in 1usize..7) {
        let mut rng = stream(seed, 0);
        let t = random_labels(n, k, &mut rng);
        let mut sigma: Vec<usize> = (0..k).collect();
        sigma.shuffle(&mut rng);
        let p: Vec<usize> = t.iter().map(|&l| sigma[l]).collect();
        prop_assert!(exact_recovery(&t, &p, k).unwrap());
        prop_assert_eq!(ari(&t, &p).unwrap(), 1.0);
        let q = random_labels(n, k, &mut rng);
        if exact_recovery(&t, &q, k).unwrap() {
            prop_assert_eq!(ari(&t, &q).unwrap(), 1.0);
        }
    }

    #[test]
    fn balanced_prediction_scores_at_least_one_over_k(seed in any::<u64>(), per in 1usize..15, k in 1usize..7) {
        let mut rng = stream(seed, 0);
        let n = per * k;
        let t = random_labels(n, k, &mut rng);
        let mut p: Vec<usize> = (0..n).map(|i| i % k).collect();
        p.shuffle(&mut rng);
        // Integer form of accuracy >= 1/K.
        prop_assert!(matched_count(&t, &p, k).unwrap() as usize * k >= n);
    }
}
