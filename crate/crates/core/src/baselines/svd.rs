//! Truncated SVD by randomized subspace iteration on `A A^T`.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::linalg::{from_columns, norm, orthonormalize, symmetric_eigen, to_columns, LinearOperator};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    /// Convergence threshold on `max_k ||A A^T u_k - s_k^2 u_k|| / s_1^2`.
    pub tol: f64,
    pub max_iters: usize,
    /// Extra basis vectors carried beyond `k`.
    pub oversample: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 1000,
            oversample: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    /// `n x k`, orthonormal columns.
    pub left_vectors: DenseMatrix,
    /// `m x k`, orthonormal columns.
    pub right_vectors: DenseMatrix,
    pub iterations: usize,
    pub residual: f64,
}

/// Top-`k` singular triplets of `op`.
///
/// Signs are fixed so the largest-magnitude entry of each left vector is
/// positive (first such entry on ties).
pub fn truncated_svd<Op, R>(op: &Op, k: usize, opts: &SvdOptions, rng: &mut R) -> Result<SvdResult>
where
    Op: LinearOperator + ?Sized,
    R: Rng + ?Sized,
{
    let n = op.nrows();
    let m = op.ncols();
    if k == 0 || k > n.min(m) {
        return invalid(format!("need 1 <= k <= {}, got k = {k}", n.min(m)));
    }
    let p = (k + opts.oversample).min(n).min(m);

    let mut q: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize(&mut q, &[], rng);
    let mut residual = f64::INFINITY;

    for iteration in 1..=opts.max_iters {
        let q_block = from_columns(&q);
        let w = op.apply_transpose_block(&q_block); // m x p
        let y = op.apply_block(&w); // n x p = A A^T Q
        let wc = to_columns(&w);
        let mut gram = DenseMatrix::zeros(p, p);
        for a in 0..p {
            for b in a..p {
                let v: f64 = wc[a].iter().zip(&wc[b]).map(|(x, y)| x * y).sum();
                gram[(a, b)] = v;
                gram[(b, a)] = v;
            }
        }
        let (lambda, rot) = symmetric_eigen(&gram);
        let lambda1 = lambda[0].max(0.0);

        // Ritz vectors u = Q s, their images A A^T u = Y s and A^T u = W s.
        let combine = |cols: &DenseMatrix, c: usize| -> Vec<f64> {
            let mut out = vec![0.0; cols.rows()];
            for r in 0..cols.rows() {
                out[r] = cols.row(r).iter().zip(0..p).map(|(x, b)| x * rot[(b, c)]).sum();
            }
            out
        };
        let u: Vec<Vec<f64>> = (0..k).map(|c| combine(&q_block, c)).collect();
        let yu: Vec<Vec<f64>> = (0..k).map(|c| combine(&y, c)).collect();
        residual = if lambda1 > 0.0 {
            (0..k)
                .map(|c| {
                    let r: Vec<f64> = yu[c].iter().zip(&u[c]).map(|(a, b)| a - lambda[c] * b).collect();
                    norm(&r) / lambda1
                })
                .fold(0.0, f64::max)
        } else {
            0.0
        };

        if residual < opts.tol {
            let sigma: Vec<f64> = lambda[..k].iter().map(|&l| l.max(0.0).sqrt()).collect();
            let mut left = u;
            let mut right: Vec<Vec<f64>> = (0..k).map(|c| combine(&w, c)).collect();
            for c in 0..k {
                let pivot = left[c]
                    .iter()
                    .enumerate()
                    .fold((0, 0.0f64), |best, (i, &x)| if x.abs() > best.1.abs() { (i, x) } else { best });
                if pivot.1 < 0.0 {
                    left[c].iter_mut().for_each(|x| *x = -*x);
                    right[c].iter_mut().for_each(|x| *x = -*x);
                }
            }
            let mut done: Vec<Vec<f64>> = Vec::with_capacity(k);
            for c in 0..k {
                let mut v = std::mem::take(&mut right[c]);
                if sigma[c] > 1e-12 {
                    v.iter_mut().for_each(|x| *x /= sigma[c]);
                    done.push(v);
                } else {
                    let mut fresh = vec![(0..m).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>()];
                    orthonormalize(&mut fresh, &done, rng);
                    done.push(fresh.pop().expect("one column"));
                }
            }
            return Ok(SvdResult {
                singular_values: sigma,
                left_vectors: from_columns(&left),
                right_vectors: from_columns(&done),
                iterations: iteration,
                residual,
            });
        }

        q = to_columns(&y);
        orthonormalize(&mut q, &[], rng);
    }
    Err(Error::Convergence {
        iterations: opts.max_iters,
        residual,
    })
}
