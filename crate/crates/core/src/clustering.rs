//! Lloyd's K-means with plus-plus seeding and restarts, plus the
//! smoothing-then-clustering pipeline (`KMP`).

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::estimator::estimate;
use crate::graph_model::{AdjacencyMatrix, LabelVector};
use crate::matrix::DenseMatrix;
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seeding {
    /// Distance-squared weighted seeding.
    PlusPlus,
    /// `k` distinct rows chosen uniformly.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once the relative objective improvement falls below this.
    pub tolerance: f64,
    pub seeding: Seeding,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iters: 100,
            tolerance: 1e-8,
            seeding: Seeding::PlusPlus,
        }
    }
}

impl KMeansOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return invalid("k-means needs at least one restart");
        }
        if self.max_iters == 0 {
            return invalid("k-means needs at least one iteration");
        }
        if !(self.tolerance >= 0.0) {
            return invalid(format!("tolerance {} must be >= 0", self.tolerance));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub labels: LabelVector,
    /// `k` centroids, one per row.
    pub centroids: DenseMatrix,
    /// Sum of squared distances from each row to its centroid.
    pub objective: f64,
    pub iterations_used: usize,
    pub restart_chosen: usize,
    /// Objective after the initial assignment and after every Lloyd update
    /// of the chosen restart.
    pub objective_history: Vec<f64>,
}

/// Squared distance with four Kahan-compensated lanes.
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = [0.0f64; 4];
    let mut comp = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let (tail_a, tail_b) = (chunks_a.remainder(), chunks_b.remainder());
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for l in 0..4 {
            let d = ca[l] - cb[l];
            let y = d * d - comp[l];
            let t = sum[l] + y;
            comp[l] = (t - sum[l]) - y;
            sum[l] = t;
        }
    }
    for (l, (x, y)) in tail_a.iter().zip(tail_b).enumerate() {
        let d = x - y;
        let y = d * d - comp[l];
        let t = sum[l] + y;
        comp[l] = (t - sum[l]) - y;
        sum[l] = t;
    }
    (sum[0] + sum[1]) + (sum[2] + sum[3])
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `sum_i ||row_i - centroid_{label_i}||^2`.
pub fn objective(rows: &DenseMatrix, labels: &[usize], centroids: &DenseMatrix) -> f64 {
    neumaier_sum(
        labels
            .iter()
            .enumerate()
            .map(|(i, &l)| squared_distance(rows.row(i), centroids.row(l))),
    )
}

fn seed_centroids<R: Rng>(rows: &DenseMatrix, k: usize, seeding: Seeding, rng: &mut R) -> DenseMatrix {
    let n = rows.rows();
    let chosen: Vec<usize> = match seeding {
        Seeding::Random => index::sample(rng, n, k).into_vec(),
        Seeding::PlusPlus => {
            let mut chosen = vec![rng.random_range(0..n)];
            let mut nearest: Vec<f64> = (0..n)
                .map(|i| squared_distance(rows.row(i), rows.row(chosen[0])))
                .collect();
            while chosen.len() < k {
                let total: f64 = nearest.iter().sum();
                let next = if total > 0.0 {
                    let target = rng.random::<f64>() * total;
                    let mut acc = 0.0;
                    let mut pick = None;
                    for (i, &w) in nearest.iter().enumerate() {
                        acc += w;
                        if w > 0.0 && acc > target {
                            pick = Some(i);
                            break;
                        }
                    }
                    pick.unwrap_or_else(|| nearest.iter().rposition(|&w| w > 0.0).expect("positive mass"))
                } else {
                    // Every row coincides with a chosen centre.
                    let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
                    free[rng.random_range(0..free.len())]
                };
                chosen.push(next);
                for (i, w) in nearest.iter_mut().enumerate() {
                    *w = w.min(squared_distance(rows.row(i), rows.row(next)));
                }
            }
            chosen
        }
    };
    let mut centroids = DenseMatrix::zeros(k, rows.cols());
    for (c, &i) in chosen.iter().enumerate() {
        centroids.row_mut(c).copy_from_slice(rows.row(i));
    }
    centroids
}

/// Nearest-centroid assignment (ties to the lower index), followed by
/// empty-cluster repair: each empty cluster takes the row farthest from its
/// current centroid among clusters holding at least two rows.
fn assign(rows: &DenseMatrix, centroids: &mut DenseMatrix) -> Vec<usize> {
    let k = centroids.rows();
    let (mut labels, mut dist): (Vec<usize>, Vec<f64>) = (0..rows.rows())
        .map(|i| {
            let row = rows.row(i);
            let mut best = (0, f64::INFINITY);
            for c in 0..k {
                let d = squared_distance(row, centroids.row(c));
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip();
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }
    for c in 0..k {
        if sizes[c] > 0 {
            continue;
        }
        let donor = (0..labels.len())
            .filter(|&i| sizes[labels[i]] >= 2)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if dist[b] >= dist[i] => Some(b),
                _ => Some(i),
            })
            .expect("k <= n leaves a cluster with two rows");
        sizes[labels[donor]] -= 1;
        sizes[c] = 1;
        labels[donor] = c;
        dist[donor] = 0.0;
        centroids.row_mut(c).copy_from_slice(rows.row(donor));
    }
    labels
}

/// Cluster means, accumulated as offsets from each cluster's first row so a
/// cluster of identical rows reproduces that row exactly.
fn update_centroids(rows: &DenseMatrix, labels: &[usize], k: usize) -> DenseMatrix {
    let mut anchor = vec![usize::MAX; k];
    for (i, &l) in labels.iter().enumerate() {
        if anchor[l] == usize::MAX {
            anchor[l] = i;
        }
    }
    let mut offsets = DenseMatrix::zeros(k, rows.cols());
    let mut sizes = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        sizes[l] += 1;
        let base = rows.row(anchor[l]);
        for ((c, &x), &b) in offsets.row_mut(l).iter_mut().zip(rows.row(i)).zip(base) {
            *c += x - b;
        }
    }
    let mut centroids = DenseMatrix::zeros(k, rows.cols());
    for c in 0..k {
        if sizes[c] == 0 {
            continue;
        }
        let size = sizes[c] as f64;
        let base = rows.row(anchor[c]);
        for ((out, &off), &b) in centroids.row_mut(c).iter_mut().zip(offsets.row(c)).zip(base) {
            *out = b + off / size;
        }
    }
    centroids
}

struct Run {
    labels: Vec<usize>,
    centroids: DenseMatrix,
    objective: f64,
    iterations: usize,
    history: Vec<f64>,
}

fn lloyd(rows: &DenseMatrix, k: usize, opts: &KMeansOptions, rng: &mut StreamRng) -> Run {
    let mut centroids = seed_centroids(rows, k, opts.seeding, rng);
    let mut labels = assign(rows, &mut centroids);
    centroids = update_centroids(rows, &labels, k);
    let mut obj = objective(rows, &labels, &centroids);
    let mut history = vec![obj];
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let next = assign(rows, &mut centroids);
        if next == labels {
            break;
        }
        labels = next;
        centroids = update_centroids(rows, &labels, k);
        let new_obj = objective(rows, &labels, &centroids);
        history.push(new_obj);
        let improvement = obj - new_obj;
        let previous = obj;
        obj = new_obj;
        if previous == 0.0 || improvement < opts.tolerance * previous {
            break;
        }
    }
    Run {
        labels,
        centroids,
        objective: obj,
        iterations,
        history,
    }
}

/// Best-of-`restarts` Lloyd clustering of the rows of `rows` into `k` groups.
pub fn kmeans<R: Rng + ?Sized>(
    rows: &DenseMatrix,
    k: usize,
    opts: &KMeansOptions,
    rng: &mut R,
) -> Result<ClusteringResult> {
    opts.validate()?;
    let n = rows.rows();
    if k == 0 {
        return invalid("k must be positive");
    }
    if k > n {
        return invalid(format!("k = {k} exceeds the number of rows {n}"));
    }
    let seeds: Vec<u64> = (0..opts.restarts).map(|_| rng.random()).collect();
    let runs: Vec<Run> = seeds
        .par_iter()
        .map(|&s| lloyd(rows, k, opts, &mut StreamRng::seed_from_u64(s)))
        .collect();
    let (restart_chosen, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|best, cand| if cand.1.objective < best.1.objective { cand } else { best })
        .expect("at least one restart");
    Ok(ClusteringResult {
        labels: LabelVector::new(best.labels, k)?,
        centroids: best.centroids,
        objective: best.objective,
        iterations_used: best.iterations,
        restart_chosen,
        objective_history: best.history,
    })
}

/// Neighbourhood-smoothing estimate followed by K-means on its rows.
pub fn kmp_pipeline<R: Rng + ?Sized>(
    a: &AdjacencyMatrix,
    k: usize,
    h: Option<f64>,
    opts: &KMeansOptions,
    rng: &mut R,
) -> Result<LabelVector> {
    let est = estimate(a, h)?;
    Ok(kmeans(est.matrix(), k, opts, rng)?.labels)
}
