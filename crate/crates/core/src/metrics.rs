//! Partition agreement: adjusted Rand index, accuracy up to label
//! permutation and exact recovery.

use crate::error::{invalid, Result};

/// Cross-tabulation of true against predicted labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn new(truth: &[usize], pred: &[usize]) -> Result<Self> {
        if truth.len() != pred.len() {
            return invalid(format!(
                "label vectors differ in length: {} vs {}",
                truth.len(),
                pred.len()
            ));
        }
        let rows = truth.iter().max().map_or(0, |m| m + 1);
        let cols = pred.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![0u64; rows * cols];
        let mut row_sums = vec![0u64; rows];
        let mut col_sums = vec![0u64; cols];
        for (&t, &p) in truth.iter().zip(pred) {
            counts[t * cols + p] += 1;
            row_sums[t] += 1;
            col_sums[p] += 1;
        }
        Ok(Self {
            rows,
            cols,
            counts,
            row_sums,
            col_sums,
            total: truth.len() as u64,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn count(&self, t: usize, p: usize) -> u64 {
        if t < self.rows && p < self.cols {
            self.counts[t * self.cols + p]
        } else {
            0
        }
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

fn pairs(x: u64) -> i128 {
    let x = x as i128;
    x * (x - 1) / 2
}

/// Adjusted Rand index. Two trivial, identical partitions score 1.
///
/// Scaled by `C(n, 2)` the index is a ratio of integers, so the result is
/// the single correctly rounded quotient.
pub fn ari(truth: &[usize], pred: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(truth, pred)?;
    if table.total() < 2 {
        return invalid("ARI needs at least two nodes");
    }
    let index: i128 = table.counts.iter().map(|&c| pairs(c)).sum();
    let a: i128 = table.row_sums().iter().map(|&c| pairs(c)).sum();
    let b: i128 = table.col_sums().iter().map(|&c| pairs(c)).sum();
    let total = pairs(table.total());
    let num = 2 * (index * total - a * b);
    let den = (a + b) * total - 2 * a * b;
    if den == 0 {
        return Ok(1.0);
    }
    Ok(num as f64 / den as f64)
}

/// Maximum-weight perfect matching on a square matrix (Hungarian method with
/// potentials, `O(k^3)`). Returns `assignment[row] = col`.
pub fn max_weight_assignment(weights: &[Vec<i64>]) -> Vec<usize> {
    let k = weights.len();
    if k == 0 {
        return Vec::new();
    }
    let top = weights.iter().flatten().copied().max().unwrap_or(0);
    let cost = |i: usize, j: usize| top - weights[i][j];
    // 1-based arrays; index 0 is the virtual start column.
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut matched = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        matched[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; k];
    for j in 1..=k {
        if matched[j] > 0 {
            assignment[matched[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Largest number of nodes on which `truth` and a relabelling of `pred` agree.
pub fn matched_count(truth: &[usize], pred: &[usize], k: usize) -> Result<u64> {
    if let Some(&l) = truth.iter().chain(pred).find(|&&l| l >= k) {
        return invalid(format!("label {l} is not below k = {k}"));
    }
    let table = ContingencyTable::new(truth, pred)?;
    let weights: Vec<Vec<i64>> = (0..k)
        .map(|t| (0..k).map(|p| table.count(t, p) as i64).collect())
        .collect();
    let assignment = max_weight_assignment(&weights);
    Ok(assignment
        .iter()
        .enumerate()
        .map(|(t, &p)| table.count(t, p))
        .sum())
}

/// `max_sigma (1/n) #{ i : truth(i) = sigma(pred(i)) }`.
pub fn permutation_accuracy(truth: &[usize], pred: &[usize], k: usize) -> Result<f64> {
    let matched = matched_count(truth, pred, k)?;
    if truth.is_empty() {
        return invalid("accuracy needs at least one node");
    }
    Ok(matched as f64 / truth.len() as f64)
}

/// True iff some relabelling of `pred` reproduces `truth` on every node.
pub fn exact_recovery(truth: &[usize], pred: &[usize], k: usize) -> Result<bool> {
    Ok(matched_count(truth, pred, k)? == truth.len() as u64)
}
