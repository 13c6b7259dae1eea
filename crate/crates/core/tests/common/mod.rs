//! Brute-force reference implementations shared by the integration tests.
//! Each one follows the textbook definition directly and shares no code
//! path with the library routine it checks.

#![allow(dead_code)]

use rand::Rng;
use sdsbm_core::AdjacencyMatrix;

/// Dense 0/1 rows of a random directed graph with zero diagonal.
pub fn random_dense<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<Vec<u8>> {
    (0..n)
        .map(|i| (0..n).map(|j| u8::from(i != j && rng.random::<f64>() < p)).collect())
        .collect()
}

pub fn adjacency(rows: &[Vec<u8>]) -> AdjacencyMatrix {
    AdjacencyMatrix::from_dense(rows, true).expect("valid 0/1 matrix")
}

/// `max_{k != i, j} |<A_i - A_j, A_k>|` as an integer, for every ordered
/// pair; inner products are recomputed from scratch each time.
pub fn brute_dissimilarity(a: &[Vec<u8>]) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut d = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut best = 0i64;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let mut ip = 0i64;
                for l in 0..n {
                    ip += (a[i][l] as i64 - a[j][l] as i64) * a[k][l] as i64;
                }
                best = best.max(ip.abs());
            }
            d[i][j] = best as u64;
        }
    }
    d
}

/// `(A A^T)_{ij}` by a triple loop.
pub fn brute_gram(a: &[Vec<u8>]) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|l| (a[i][l] & a[j][l]) as u64).sum())
                .collect()
        })
        .collect()
}

/// Calls `f` with every permutation of `0..k` (Heap's algorithm).
pub fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    f(&p);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Largest number of agreements over every relabelling of `pred`.
pub fn exhaustive_matches(truth: &[usize], pred: &[usize], k: usize) -> usize {
    let mut best = 0;
    for_each_permutation(k, |sigma| {
        let hits = truth.iter().zip(pred).filter(|(&t, &p)| t == sigma[p]).count();
        best = best.max(hits);
    });
    best
}

/// ARI from the four pair counts over all `C(n, 2)` node pairs.
pub fn pair_counting_ari(truth: &[usize], pred: &[usize]) -> f64 {
    let n = truth.len();
    let (mut both, mut only_t, mut only_p, mut neither) = (0i128, 0i128, 0i128, 0i128);
    for i in 0..n {
        for j in i + 1..n {
            match (truth[i] == truth[j], pred[i] == pred[j]) {
                (true, true) => both += 1,
                (true, false) => only_t += 1,
                (false, true) => only_p += 1,
                (false, false) => neither += 1,
            }
        }
    }
    let num = 2 * (both * neither - only_t * only_p);
    let den = (both + only_t) * (only_t + neither) + (both + only_p) * (only_p + neither);
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Singular values of a dense `m x n` matrix by one-sided Jacobi
/// rotations on its columns, sorted in decreasing order.
pub fn jacobi_singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    // Work on columns of A (or of A^T when that is wider) so the column
    // count is min(m, n).
    let mut cols: Vec<Vec<f64>> = if n <= m {
        (0..n).map(|j| (0..m).map(|i| rows[i][j]).collect()).collect()
    } else {
        rows.to_vec()
    };
    let p = cols.len();
    for _sweep in 0..200 {
        let mut rotated = false;
        for a in 0..p {
            for b in a + 1..p {
                let alpha: f64 = cols[a].iter().map(|x| x * x).sum();
                let beta: f64 = cols[b].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..cols[a].len() {
                    let (x, y) = (cols[a][r], cols[b][r]);
                    cols[a][r] = c * x - s * y;
                    cols[b][r] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// `P(X <= x)` for `X ~ Binomial(n, p)`, summed in log space.
pub fn binomial_cdf(n: u64, p: f64, x: u64) -> f64 {
    let ln_fact = |k: u64| (1..=k).map(|v| (v as f64).ln()).sum::<f64>();
    let ln_n = ln_fact(n);
    (0..=x.min(n))
        .map(|k| {
            let ln_choose = ln_n - ln_fact(k) - ln_fact(n - k);
            (ln_choose + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
        })
        .sum()
}
