//! Distance kernels shared by the clustering algorithms.
//!
//! Sums run left to right over the coordinate index; parallel callers get
//! byte-identical results because each output element is produced by
//! exactly one such sequential loop.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Squared Euclidean distance between two equal-length vectors.
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(squared_euclidean_unchecked(a, b))
}

/// Like [`squared_euclidean`] without the length check; callers guarantee
/// equal lengths.
#[inline]
pub(crate) fn squared_euclidean_unchecked(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
    }
    sum
}

/// Full n-by-n matrix of pairwise squared Euclidean distances between rows.
///
/// Symmetric with a zero diagonal. `D[i][j]` and `D[j][i]` are computed
/// independently but agree bitwise because `(x-y)^2 == (y-x)^2` exactly.
pub fn pairwise_sq_distances(x: &DenseMatrix) -> Result<DenseMatrix> {
    if x.rows() == 0 {
        return Err(Error::EmptyInput("pairwise distances of empty matrix".into()));
    }
    let n = x.rows();
    let mut d = DenseMatrix::zeros(n, n);
    d.par_rows_mut().enumerate().for_each(|(i, out)| {
        let ri = x.row(i);
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = if i == j {
                0.0
            } else {
                squared_euclidean_unchecked(ri, x.row(j))
            };
        }
    });
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    #[test]
    fn identical_vectors_have_zero_distance() {
        assert_eq!(squared_euclidean(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn three_four_five() {
        assert_eq!(squared_euclidean(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 25.0);
    }

    #[test]
    fn length_mismatch_is_error() {
        assert!(squared_euclidean(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn random_pair_matches_scalar_loop_oracle() {
        let mut rng = SeededRng::new(17);
        let a: Vec<f64> = (0..100).map(|_| rng.next_f64() * 10.0 - 5.0).collect();
        let b: Vec<f64> = (0..100).map(|_| rng.next_f64() * 10.0 - 5.0).collect();
        // independent oracle: index the arrays directly
        let mut expect = 0.0;
        for i in 0..100 {
            expect += (a[i] - b[i]) * (a[i] - b[i]);
        }
        let got = squared_euclidean(&a, &b).unwrap();
        assert!((got - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        // symmetry
        assert_eq!(got, squared_euclidean(&b, &a).unwrap());
    }

    #[test]
    fn pairwise_single_point() {
        let x = DenseMatrix::from_vec(1, 2, vec![3.0, 4.0]).unwrap();
        let d = pairwise_sq_distances(&x).unwrap();
        assert_eq!(d.rows(), 1);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn pairwise_empty_is_error() {
        let x = DenseMatrix::zeros(0, 3);
        assert!(pairwise_sq_distances(&x).is_err());
    }

    #[test]
    fn pairwise_scalar_fixture() {
        let x = DenseMatrix::from_vec(4, 1, vec![0.0, 1.0, 10.0, 11.0]).unwrap();
        let d = pairwise_sq_distances(&x).unwrap();
        assert_eq!(d.get(0, 3), 121.0);
        assert_eq!(d.get(1, 2), 81.0);
        assert_eq!(d.get(3, 0), 121.0);
    }

    #[test]
    fn pairwise_matches_per_pair_calls() {
        let mut rng = SeededRng::new(99);
        let vals: Vec<f64> = (0..20 * 5).map(|_| rng.next_f64()).collect();
        let x = DenseMatrix::from_vec(20, 5, vals).unwrap();
        let d = pairwise_sq_distances(&x).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                let expect = if i == j {
                    0.0
                } else {
                    squared_euclidean(x.row(i), x.row(j)).unwrap()
                };
                assert_eq!(d.get(i, j), expect);
                assert_eq!(d.get(i, j), d.get(j, i));
            }
        }
    }
}
