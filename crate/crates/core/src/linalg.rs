//! Small dense linear-algebra kernels: block products with a linear
//! operator, re-orthonormalization and a Jacobi eigensolver for the
//! projected problem in subspace iteration.

use rand::Rng;

use crate::graph_model::AdjacencyMatrix;
use crate::matrix::DenseMatrix;

/// A real matrix that can be applied to blocks of vectors.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = A x` for an `ncols x p` block `x`.
    fn apply_block(&self, x: &DenseMatrix) -> DenseMatrix;
    /// `y = A^T x` for an `nrows x p` block `x`.
    fn apply_transpose_block(&self, x: &DenseMatrix) -> DenseMatrix;
}

fn axpy(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

impl LinearOperator for AdjacencyMatrix {
    fn nrows(&self) -> usize {
        self.n()
    }

    fn ncols(&self) -> usize {
        self.n()
    }

    fn apply_block(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut y = DenseMatrix::zeros(self.n(), x.cols());
        for i in 0..self.n() {
            let dst = y.row_mut(i);
            for &j in self.out_neighbors(i) {
                axpy(dst, x.row(j as usize));
            }
        }
        y
    }

    fn apply_transpose_block(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut y = DenseMatrix::zeros(self.n(), x.cols());
        for i in 0..self.n() {
            let src = x.row(i);
            for &j in self.out_neighbors(i) {
                axpy(y.row_mut(j as usize), src);
            }
        }
        y
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply_block(&self, x: &DenseMatrix) -> DenseMatrix {
        self.matmul(x).expect("block height matches operator width")
    }

    fn apply_transpose_block(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut y = DenseMatrix::zeros(self.cols(), x.cols());
        for i in 0..self.rows() {
            let src = x.row(i);
            for (j, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    for (d, s) in y.row_mut(j).iter_mut().zip(src) {
                        *d += a * s;
                    }
                }
            }
        }
        y
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormalizes columns in place with two passes of modified
/// Gram-Schmidt against `fixed` and earlier columns. Columns that collapse
/// are replaced by random directions.
pub(crate) fn orthonormalize<R: Rng + ?Sized>(cols: &mut [Vec<f64>], fixed: &[Vec<f64>], rng: &mut R) {
    for c in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(c);
        let col = &mut rest[0];
        let original = norm(col);
        let mut attempts = 0;
        loop {
            for _ in 0..2 {
                for q in fixed.iter().chain(done.iter()) {
                    let proj = dot(col, q);
                    for (x, y) in col.iter_mut().zip(q) {
                        *x -= proj * y;
                    }
                }
            }
            let nrm = norm(col);
            let reference = if attempts == 0 { original } else { 1.0 };
            if nrm > 1e-10 * reference.max(f64::MIN_POSITIVE) && nrm > 0.0 {
                col.iter_mut().for_each(|x| *x /= nrm);
                break;
            }
            attempts += 1;
            assert!(attempts < 64, "cannot extend orthonormal basis");
            col.iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0));
        }
    }
}

pub(crate) fn to_columns(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.cols()).map(|j| m.column(j)).collect()
}

pub(crate) fn from_columns(cols: &[Vec<f64>]) -> DenseMatrix {
    let rows = cols.first().map_or(0, Vec::len);
    let mut m = DenseMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in nonincreasing order and the matching eigenvectors
/// as columns.
pub fn symmetric_eigen(m: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let p = m.rows();
    let mut a = m.clone();
    let mut v = DenseMatrix::zeros(p, p);
    for i in 0..p {
        v[(i, i)] = 1.0;
    }
    let scale: f64 = a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..p)
            .flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for i in 0..p {
            for j in i + 1..p {
                let aij = a[(i, j)];
                if aij.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(j, j)] - a[(i, i)]) / (2.0 * aij);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let aki = a[(k, i)];
                    let akj = a[(k, j)];
                    a[(k, i)] = c * aki - s * akj;
                    a[(k, j)] = s * aki + c * akj;
                }
                for k in 0..p {
                    let aik = a[(i, k)];
                    let ajk = a[(j, k)];
                    a[(i, k)] = c * aik - s * ajk;
                    a[(j, k)] = s * aik + c * ajk;
                }
                for k in 0..p {
                    let vki = v[(k, i)];
                    let vkj = v[(k, j)];
                    v[(k, i)] = c * vki - s * vkj;
                    v[(k, j)] = s * vki + c * vkj;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| a[(y, y)].total_cmp(&a[(x, x)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(p, p);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..p {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    (values, vectors)
}
