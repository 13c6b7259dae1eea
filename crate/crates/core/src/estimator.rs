//! Neighborhood-smoothing estimate of the edge-probability matrix from a
//! single observed graph.
//!
//! The pipeline is `gram -> dissimilarity_all -> neighborhoods -> smooth`.
//! All intermediate quantities are integer counts until the final division,
//! so every estimate is an exact rational `count / |N_i|` rounded once.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fmt::significant;
use crate::graph_model::AdjacencyMatrix;
use crate::matrix::DenseMatrix;

/// `(1/n) A A^T`, stored as the integer inner products `<A_i., A_j.>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    n: usize,
    counts: Vec<u32>,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of common out-neighbours of `i` and `j`.
    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.n + j]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.count(i, j) as f64 / self.n as f64
    }

    pub fn count_row(&self, i: usize) -> &[u32] {
        &self.counts[i * self.n..(i + 1) * self.n]
    }
}

/// How the Gram matrix is accumulated. Both strategies give identical counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramStrategy {
    /// Pick the cheaper of the two from the degree profile.
    Auto,
    /// Popcount over bit-packed rows, `O(n^2 * n / 64)`.
    Bitset,
    /// Scatter through in-neighbour lists, `O(sum_l indeg(l)^2)`.
    Sparse,
}

pub fn gram(a: &AdjacencyMatrix) -> Result<GramMatrix> {
    gram_with(a, GramStrategy::Auto)
}

pub fn gram_with(a: &AdjacencyMatrix, strategy: GramStrategy) -> Result<GramMatrix> {
    let n = a.n();
    if n < 2 {
        return invalid(format!("Gram matrix needs n >= 2, got {n}"));
    }
    let strategy = match strategy {
        GramStrategy::Auto => {
            let sparse_cost: usize = a.in_neighbors().iter().map(|c| c.len() * c.len()).sum();
            let bitset_cost = n * n * n.div_ceil(64) / 2;
            if sparse_cost < bitset_cost {
                GramStrategy::Sparse
            } else {
                GramStrategy::Bitset
            }
        }
        s => s,
    };
    let mut counts = vec![0u32; n * n];
    match strategy {
        GramStrategy::Bitset => {
            counts.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                let bi = a.row_bits(i);
                for (j, dst) in row.iter_mut().enumerate() {
                    *dst = bi
                        .iter()
                        .zip(a.row_bits(j))
                        .map(|(x, y)| (x & y).count_ones())
                        .sum();
                }
            });
        }
        GramStrategy::Sparse => {
            let cols = a.in_neighbors();
            counts.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                for &l in a.out_neighbors(i) {
                    for &k in &cols[l as usize] {
                        row[k as usize] += 1;
                    }
                }
            });
        }
        GramStrategy::Auto => unreachable!("resolved above"),
    }
    Ok(GramMatrix { n, counts })
}

/// Whether dissimilarity values are reported as raw inner-product
/// differences or divided by `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Normalized,
    Raw,
}

/// `d(i, j) = max_{k != i, j} |<A_i. - A_j., A_k.>|`, optionally divided by `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    raw: Vec<u32>,
    convention: Convention,
}

impl DissimilarityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn with_convention(&self, convention: Convention) -> Self {
        Self {
            convention,
            ..self.clone()
        }
    }

    /// Integer numerator of `d(i, j)`.
    pub fn raw(&self, i: usize, j: usize) -> u32 {
        self.raw[i * self.n + j]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        let r = self.raw(i, j) as f64;
        match self.convention {
            Convention::Normalized => r / self.n as f64,
            Convention::Raw => r,
        }
    }
}

fn max_abs_diff(a: &[u32], b: &[u32]) -> u32 {
    // `abs_diff` cannot overflow, which keeps this loop vectorizable even
    // with overflow checks on.
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).fold(0, u32::max)
}

pub fn dissimilarity_all(a: &AdjacencyMatrix) -> Result<DissimilarityMatrix> {
    let n = a.n();
    if n < 3 {
        return invalid(format!("dissimilarity needs n >= 3, got {n}"));
    }
    dissimilarity_from_gram(&gram(a)?)
}

/// Dissimilarities from a precomputed Gram matrix (normalized convention).
pub fn dissimilarity_from_gram(g: &GramMatrix) -> Result<DissimilarityMatrix> {
    let n = g.n();
    if n < 3 {
        return invalid(format!("dissimilarity needs n >= 3, got {n}"));
    }
    let row = |i: usize| g.count_row(i);
    // Upper triangle row by row, then mirrored.
    let upper: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let gi = row(i);
            (i + 1..n)
                .map(|j| {
                    let gj = row(j);
                    max_abs_diff(&gi[..i], &gj[..i])
                        .max(max_abs_diff(&gi[i + 1..j], &gj[i + 1..j]))
                        .max(max_abs_diff(&gi[j + 1..], &gj[j + 1..]))
                })
                .collect()
        })
        .collect();
    let mut raw = vec![0u32; n * n];
    for (i, vals) in upper.iter().enumerate() {
        for (off, &v) in vals.iter().enumerate() {
            let j = i + 1 + off;
            raw[i * n + j] = v;
            raw[j * n + i] = v;
        }
    }
    Ok(DissimilarityMatrix {
        n,
        raw,
        convention: Convention::Normalized,
    })
}

/// Per-node neighbourhoods `N_i = { j != i : d(i, j) <= q_i(h) }`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodSet {
    h: f64,
    members: Vec<Vec<usize>>,
}

impl NeighborhoodSet {
    /// Wraps explicit neighbour lists. Every list must be nonempty, sorted,
    /// within range and must not contain its own node.
    pub fn from_lists(h: f64, members: Vec<Vec<usize>>) -> Result<Self> {
        let n = members.len();
        for (i, list) in members.iter().enumerate() {
            if list.contains(&i) {
                return invalid(format!("node {i} is in its own neighbourhood"));
            }
            if let Some(&j) = list.iter().find(|&&j| j >= n) {
                return invalid(format!("neighbour {j} of node {i} is out of range"));
            }
        }
        Ok(Self { h, members })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self, i: usize) -> &[usize] {
        &self.members[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }
}

/// Rank of the quantile order statistic: `ceil(h (n - 1))`.
pub fn quantile_rank(h: f64, n: usize) -> usize {
    ((h * (n - 1) as f64).ceil() as usize).clamp(1, n.saturating_sub(1).max(1))
}

pub fn neighborhoods(d: &DissimilarityMatrix, h: f64) -> Result<NeighborhoodSet> {
    if !(h > 0.0 && h < 1.0) {
        return invalid(format!("bandwidth h = {h} must lie in (0, 1)"));
    }
    let n = d.n();
    if n < 2 {
        return invalid("neighbourhoods need at least two nodes");
    }
    let rank = quantile_rank(h, n);
    let members = (0..n)
        .into_par_iter()
        .map(|i| {
            let values: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| d.value(i, j)).collect();
            let mut sorted = values.clone();
            let (_, q, _) = sorted.select_nth_unstable_by(rank - 1, f64::total_cmp);
            let q = *q;
            (0..n)
                .filter(|&j| j != i)
                .zip(values)
                .filter(|&(_, v)| v <= q)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    Ok(NeighborhoodSet { h, members })
}

/// Smoothed estimate `P~_ij = |N_i|^{-1} sum_{i' in N_i} A_{i'j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedMatrix {
    values: DenseMatrix,
    neighborhood_sizes: Vec<usize>,
}

impl EstimatedMatrix {
    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.values
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.values
    }

    pub fn neighborhood_sizes(&self) -> &[usize] {
        &self.neighborhood_sizes
    }

    pub fn min_neighborhood(&self) -> usize {
        self.neighborhood_sizes.iter().copied().min().unwrap_or(0)
    }

    /// CSV with one line per row and 9 significant digits per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.n() * self.n() * 8);
        for row in self.values.row_iter() {
            for (j, &v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&significant(v, 9));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

pub fn smooth(a: &AdjacencyMatrix, hoods: &NeighborhoodSet) -> Result<EstimatedMatrix> {
    let n = a.n();
    if hoods.len() != n {
        return invalid(format!(
            "neighbourhood set covers {} nodes, graph has {n}",
            hoods.len()
        ));
    }
    if let Some(i) = (0..n).find(|&i| hoods.members(i).is_empty()) {
        return Err(Error::Internal(format!("node {i} has an empty neighbourhood")));
    }
    let mut values = DenseMatrix::zeros(n, n);
    values
        .as_mut_slice()
        .par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            let mut counts = vec![0u32; n];
            let members = hoods.members(i);
            for &m in members {
                for &j in a.out_neighbors(m) {
                    counts[j as usize] += 1;
                }
            }
            let size = members.len() as f64;
            for (dst, c) in row.iter_mut().zip(counts) {
                *dst = c as f64 / size;
            }
        });
    Ok(EstimatedMatrix {
        values,
        neighborhood_sizes: hoods.sizes(),
    })
}

/// Bandwidth rule `h = c_h * sqrt(log n / n)`.
pub fn default_bandwidth(n: usize, c_h: f64) -> f64 {
    let n = n as f64;
    c_h * (n.ln() / n).sqrt()
}

/// Full estimator; `h = None` uses [`default_bandwidth`] with `c_h = 1`.
pub fn estimate(a: &AdjacencyMatrix, h: Option<f64>) -> Result<EstimatedMatrix> {
    let n = a.n();
    if n < 3 {
        return invalid(format!("estimator needs n >= 3, got {n}"));
    }
    let h = h.unwrap_or_else(|| default_bandwidth(n, 1.0));
    let d = dissimilarity_all(a)?;
    let hoods = neighborhoods(&d, h)?;
    smooth(a, &hoods)
}

fn check_dims(p: &DenseMatrix, q: &DenseMatrix) -> Result<()> {
    if p.rows() != q.rows() || p.cols() != q.cols() {
        return invalid(format!(
            "dimension mismatch: {}x{} vs {}x{}",
            p.rows(),
            p.cols(),
            q.rows(),
            q.cols()
        ));
    }
    Ok(())
}

/// Squared Euclidean norm of each row of `p - q`.
pub fn row_squared_errors(p: &DenseMatrix, q: &DenseMatrix) -> Result<Vec<f64>> {
    check_dims(p, q)?;
    Ok(p
        .row_iter()
        .zip(q.row_iter())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
        .collect())
}

/// `||p - q||_{2,inf} = max_i ||p_i. - q_i.||_2`.
pub fn row_error_2inf(p: &DenseMatrix, q: &DenseMatrix) -> Result<f64> {
    Ok(row_squared_errors(p, q)?
        .into_iter()
        .fold(0.0, f64::max)
        .sqrt())
}

pub fn frobenius_error(p: &DenseMatrix, q: &DenseMatrix) -> Result<f64> {
    Ok(row_squared_errors(p, q)?.into_iter().sum::<f64>().sqrt())
}
