//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Only used on the small projected matrices inside the PCA fit; the
//! matrices there are `l x l` with `l = k + oversampling`.

/// Eigendecomposition of a symmetric matrix given as a row-major buffer.
/// Returns `(eigenvalues, eigenvectors)` sorted by descending eigenvalue
/// (ties keep the lower original index first); eigenvector `i` is stored as
/// row `i` of the returned matrix buffer.
pub(crate) fn symmetric_eigen_desc(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    // v starts as identity, accumulates rotations; column j is eigenvector j
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-15 * frob.max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = m[i * n + p];
                    let aiq = m[i * n + q];
                    m[i * n + p] = c * aip - s * aiq;
                    m[i * n + q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = m[p * n + j];
                    let aqj = m[q * n + j];
                    m[p * n + j] = c * apj - s * aqj;
                    m[q * n + j] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigvals: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    order.sort_by(|&i, &j| eigvals[j].partial_cmp(&eigvals[i]).unwrap().then(i.cmp(&j)));

    let sorted_vals: Vec<f64> = order.iter().map(|&i| eigvals[i]).collect();
    let mut rows = vec![0.0; n * n];
    for (r, &col) in order.iter().enumerate() {
        for i in 0..n {
            rows[r * n + i] = v[i * n + col];
        }
    }
    (sorted_vals, rows)
}
