//! Truncated PCA by randomized subspace iteration with implicit mean
//! centering, so the sparse TF-IDF matrix is never densified.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::eigen::symmetric_eigen_desc;
use crate::numerics::{DenseMatrix, SeededRng, SparseRowMatrix};

const OVERSAMPLING: usize = 10;
const POWER_ITERATIONS: usize = 7;

/// Row access shared by the dense and sparse feature matrices.
pub trait FeatureMatrix: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// Dot product of row `i` with `v`, accumulated over stored entries in
    /// ascending column order.
    fn row_dot(&self, i: usize, v: &[f64]) -> f64;
    /// `acc[j] += scale * x[i][j]` over stored entries.
    fn add_row_scaled(&self, i: usize, scale: f64, acc: &mut [f64]);
    /// Column means, accumulated in ascending row order.
    fn column_means(&self) -> Vec<f64>;
}

impl FeatureMatrix for DenseMatrix {
    fn rows(&self) -> usize {
        DenseMatrix::rows(self)
    }

    fn cols(&self) -> usize {
        DenseMatrix::cols(self)
    }

    fn row_dot(&self, i: usize, v: &[f64]) -> f64 {
        dot(self.row(i), v)
    }

    fn add_row_scaled(&self, i: usize, scale: f64, acc: &mut [f64]) {
        for (a, x) in acc.iter_mut().zip(self.row(i)) {
            *a += scale * x;
        }
    }

    fn column_means(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols()];
        for row in self.row_iter() {
            for (s, x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        let n = self.rows() as f64;
        sums.iter_mut().for_each(|s| *s /= n);
        sums
    }
}

impl FeatureMatrix for SparseRowMatrix {
    fn rows(&self) -> usize {
        SparseRowMatrix::rows(self)
    }

    fn cols(&self) -> usize {
        SparseRowMatrix::cols(self)
    }

    fn row_dot(&self, i: usize, v: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        let mut sum = 0.0;
        for (c, x) in cols.iter().zip(vals) {
            sum += x * v[*c as usize];
        }
        sum
    }

    fn add_row_scaled(&self, i: usize, scale: f64, acc: &mut [f64]) {
        let (cols, vals) = self.row(i);
        for (c, x) in cols.iter().zip(vals) {
            acc[*c as usize] += scale * x;
        }
    }

    fn column_means(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols()];
        for i in 0..self.rows() {
            let (cols, vals) = self.row(i);
            for (c, x) in cols.iter().zip(vals) {
                sums[*c as usize] += x;
            }
        }
        let n = self.rows() as f64;
        sums.iter_mut().for_each(|s| *s /= n);
        sums
    }
}

/// Fitted PCA basis. `components` rows are orthonormal principal
/// directions; `explained_variance` is non-increasing.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: DenseMatrix,
    pub explained_variance: Vec<f64>,
    pub k: usize,
}

/// Fits a `k`-component PCA of the column-mean-centered data by randomized
/// subspace iteration (Gaussian test matrix from [`SeededRng`], oversampling
/// 10, 7 power iterations). Component signs are fixed so each row's
/// largest-magnitude entry is positive.
pub fn fit_pca<M: FeatureMatrix>(x: &M, k: usize, seed: u64) -> Result<PcaModel> {
    let n = x.rows();
    let d = x.cols();
    if n < 2 {
        return Err(Error::Parameter(format!("pca needs at least 2 rows, got {n}")));
    }
    if k == 0 || k > n.saturating_sub(1) || k > d {
        return Err(Error::Parameter(format!(
            "pca component count {k} out of range for {n} x {d} input (need 1 <= k <= min(rows-1, cols))"
        )));
    }
    let mean = x.column_means();
    let l = (k + OVERSAMPLING).min(d).min(n);

    // Gaussian test matrix, drawn column by column.
    let mut rng = SeededRng::new(seed);
    let mut omega: Vec<Vec<f64>> = Vec::with_capacity(l);
    for _ in 0..l {
        omega.push((0..d).map(|_| rng.next_gaussian()).collect());
    }

    let mut q = project_columns(x, &mean, &omega);
    orthonormalize(&mut q);

    for _ in 0..POWER_ITERATIONS {
        let mut z = transpose_project_columns(x, &mean, &q);
        orthonormalize(&mut z);
        q = project_columns(x, &mean, &z);
        orthonormalize(&mut q);
    }

    let b = transpose_project_columns(x, &mean, &q); // r x d, rows of B
    let r = b.len();

    let mut components: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut explained = Vec::with_capacity(k);
    if r > 0 {
        // small r x r Gram matrix of B, eigendecomposed by Jacobi rotations
        let mut gram = vec![0.0; r * r];
        for i in 0..r {
            for j in i..r {
                let g = dot(&b[i], &b[j]);
                gram[i * r + j] = g;
                gram[j * r + i] = g;
            }
        }
        let (eigvals, eigvecs) = symmetric_eigen_desc(&gram, r);
        let scale_tol = eigvals[0].abs().max(f64::MIN_POSITIVE) * 1e-28;
        for c in 0..k.min(r) {
            let mut v = vec![0.0; d];
            for (bi, row) in b.iter().enumerate() {
                let w = eigvecs[c * r + bi];
                for (out, x) in v.iter_mut().zip(row) {
                    *out += w * x;
                }
            }
            let norm = dot(&v, &v).sqrt();
            if eigvals[c] > scale_tol && norm > 0.0 {
                v.iter_mut().for_each(|e| *e /= norm);
                fix_sign(&mut v);
                components.push(v);
                explained.push(eigvals[c].max(0.0) / (n as f64 - 1.0));
            } else {
                break;
            }
        }
    }
    // degenerate inputs (rank below k): pad with canonical directions
    // orthogonal to what we have, carrying zero variance
    complete_basis(&mut components, d, k);
    explained.resize(k, 0.0);

    let components = DenseMatrix::from_rows(&components)?;
    Ok(PcaModel {
        mean,
        components,
        explained_variance: explained,
        k,
    })
}

/// Projects rows onto the fitted basis: `(X - mean) * components^T`.
pub fn pca_project<M: FeatureMatrix>(model: &PcaModel, x: &M) -> Result<DenseMatrix> {
    let d = model.mean.len();
    if x.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.cols(),
        });
    }
    let k = model.k;
    let mean_dots: Vec<f64> = (0..k).map(|c| dot(model.components.row(c), &model.mean)).collect();
    let mut out = DenseMatrix::zeros(x.rows(), k);
    out.par_rows_mut().enumerate().for_each(|(i, row)| {
        for (c, slot) in row.iter_mut().enumerate() {
            *slot = x.row_dot(i, model.components.row(c)) - mean_dots[c];
        }
    });
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        sum += x * y;
    }
    sum
}

/// `y_c = (X - 1 mean^T) w_c` for every column `w_c`, without densifying X.
fn project_columns<M: FeatureMatrix>(x: &M, mean: &[f64], w: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.rows();
    w.par_iter()
        .map(|wc| {
            let mean_dot = dot(mean, wc);
            (0..n).map(|i| x.row_dot(i, wc) - mean_dot).collect()
        })
        .collect()
}

/// `z_c = (X - 1 mean^T)^T q_c` for every column `q_c`.
fn transpose_project_columns<M: FeatureMatrix>(x: &M, mean: &[f64], q: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.rows();
    let d = x.cols();
    q.par_iter()
        .map(|qc| {
            let mut acc = vec![0.0; d];
            for i in 0..n {
                let s = qc[i];
                if s != 0.0 {
                    x.add_row_scaled(i, s, &mut acc);
                }
            }
            let qsum: f64 = qc.iter().sum();
            for (a, m) in acc.iter_mut().zip(mean) {
                *a -= m * qsum;
            }
            acc
        })
        .collect()
}

/// Sequential modified Gram-Schmidt; columns that collapse numerically are
/// dropped, so the result can have fewer columns than the input.
fn orthonormalize(cols: &mut Vec<Vec<f64>>) {
    let max_norm = cols
        .iter()
        .map(|c| dot(c, c).sqrt())
        .fold(0.0f64, f64::max);
    let tol = max_norm * 1e-12;
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
    for mut v in cols.drain(..) {
        for qc in &kept {
            let c = dot(qc, &v);
            for (x, q) in v.iter_mut().zip(qc) {
                *x -= c * q;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > tol && norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
            kept.push(v);
        }
    }
    *cols = kept;
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (j, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = j;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn complete_basis(rows: &mut Vec<Vec<f64>>, d: usize, k: usize) {
    let mut canon = 0usize;
    while rows.len() < k && canon < d {
        let mut v = vec![0.0; d];
        v[canon] = 1.0;
        canon += 1;
        for q in rows.iter() {
            let c = dot(q, &v);
            for (x, qv) in v.iter_mut().zip(q) {
                *x -= c * qv;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            fix_sign(&mut v);
            rows.push(v);
        }
    }
}
