//! Comparison methods: K-means on adjacency rows (`KMA`), spectral
//! clustering on singular vectors and the ratio-embedding d-score method.

mod svd;

pub use svd::{truncated_svd, SvdOptions, SvdResult};

use rand::Rng;

use crate::clustering::{kmeans, squared_distance, KMeansOptions};
use crate::error::{invalid, Result};
use crate::graph_model::{AdjacencyMatrix, LabelVector};
use crate::matrix::DenseMatrix;

/// Options shared by the SVD-based baselines.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralOptions {
    pub kmeans: KMeansOptions,
    pub svd: SvdOptions,
}

/// `|u_1(i)|` below this is treated as zero by d-score.
pub const DSCORE_ZERO: f64 = 1e-12;

fn check_k(a: &AdjacencyMatrix, k: usize) -> Result<()> {
    if k == 0 || k > a.n() {
        return invalid(format!("k = {k} must lie in 1..={}", a.n()));
    }
    Ok(())
}

/// K-means directly on the binary rows of `A`.
pub fn kma<R: Rng + ?Sized>(
    a: &AdjacencyMatrix,
    k: usize,
    opts: &KMeansOptions,
    rng: &mut R,
) -> Result<LabelVector> {
    check_k(a, k)?;
    Ok(kmeans(&a.to_dense(), k, opts, rng)?.labels)
}

/// Rows of `[U | V]` from the top-`k` singular vectors.
pub fn spectral_embedding(svd: &SvdResult) -> DenseMatrix {
    let n = svd.left_vectors.rows();
    let k = svd.left_vectors.cols();
    let mut emb = DenseMatrix::zeros(n, 2 * k);
    for i in 0..n {
        let row = emb.row_mut(i);
        row[..k].copy_from_slice(svd.left_vectors.row(i));
        row[k..].copy_from_slice(svd.right_vectors.row(i));
    }
    emb
}

/// K-means on the concatenated left/right singular-vector embedding.
pub fn spectral<R: Rng + ?Sized>(
    a: &AdjacencyMatrix,
    k: usize,
    opts: &SpectralOptions,
    rng: &mut R,
) -> Result<LabelVector> {
    check_k(a, k)?;
    let svd = truncated_svd(a, k, &opts.svd, rng)?;
    Ok(kmeans(&spectral_embedding(&svd), k, &opts.kmeans, rng)?.labels)
}

/// Ratio embedding used by d-score: for `c = 1..k-1`,
/// `u_{c+1}(i) / u_1(i)` then `v_{c+1}(i) / v_1(i)`, each clipped to
/// `[-ln n, ln n]`. Returns the embedding and a mask of nodes whose leading
/// entries are usable (`|u_1(i)|, |v_1(i)| >= DSCORE_ZERO`).
pub fn ratio_embedding(svd: &SvdResult) -> (DenseMatrix, Vec<bool>) {
    let (u, v) = (&svd.left_vectors, &svd.right_vectors);
    let n = u.rows();
    let k = u.cols();
    let clip = (n as f64).ln();
    let ratio = |num: f64, den: f64| {
        if den.abs() < DSCORE_ZERO {
            0.0
        } else {
            (num / den).clamp(-clip, clip)
        }
    };
    let mut emb = DenseMatrix::zeros(n, 2 * (k - 1));
    let mut usable = vec![true; n];
    for i in 0..n {
        let (u1, v1) = (u[(i, 0)], v[(i, 0)]);
        usable[i] = u1.abs() >= DSCORE_ZERO && v1.abs() >= DSCORE_ZERO;
        let row = emb.row_mut(i);
        for c in 1..k {
            row[c - 1] = ratio(u[(i, c)], u1);
            row[k - 1 + c - 1] = ratio(v[(i, c)], v1);
        }
    }
    (emb, usable)
}

/// d-score: K-means on entrywise singular-vector ratios. Nodes whose
/// leading singular-vector entries vanish are placed with the cluster whose
/// mean `[U | V]` embedding is nearest.
pub fn dscore<R: Rng + ?Sized>(
    a: &AdjacencyMatrix,
    k: usize,
    opts: &SpectralOptions,
    rng: &mut R,
) -> Result<LabelVector> {
    check_k(a, k)?;
    if k < 2 {
        return invalid("d-score needs k >= 2");
    }
    let svd = truncated_svd(a, k, &opts.svd, rng)?;
    let (ratios, usable) = ratio_embedding(&svd);
    let good: Vec<usize> = (0..a.n()).filter(|&i| usable[i]).collect();
    let raw = spectral_embedding(&svd);
    if good.len() < k {
        return Ok(kmeans(&raw, k, &opts.kmeans, rng)?.labels);
    }
    let mut sub = DenseMatrix::zeros(good.len(), ratios.cols());
    for (r, &i) in good.iter().enumerate() {
        sub.row_mut(r).copy_from_slice(ratios.row(i));
    }
    let fit = kmeans(&sub, k, &opts.kmeans, rng)?;
    let mut labels = vec![0usize; a.n()];
    for (&i, &l) in good.iter().zip(fit.labels.as_slice()) {
        labels[i] = l;
    }
    if good.len() < a.n() {
        let mut centres = DenseMatrix::zeros(k, raw.cols());
        let mut sizes = vec![0usize; k];
        for &i in &good {
            let l = labels[i];
            sizes[l] += 1;
            for (c, &x) in centres.row_mut(l).iter_mut().zip(raw.row(i)) {
                *c += x;
            }
        }
        for (c, &s) in sizes.iter().enumerate() {
            centres.row_mut(c).iter_mut().for_each(|x| *x /= s as f64);
        }
        for i in (0..a.n()).filter(|&i| !usable[i]) {
            labels[i] = (0..k)
                .min_by(|&x, &y| {
                    squared_distance(raw.row(i), centres.row(x))
                        .total_cmp(&squared_distance(raw.row(i), centres.row(y)))
                })
                .expect("k >= 2");
        }
    }
    LabelVector::new(labels, k)
}
