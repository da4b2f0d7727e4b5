//! Lloyd's K-means with uniform random initialization and seeded restarts.

use std::time::Instant;

use rayon::prelude::*;

use crate::assignment::{Algorithm, Assignment};
use crate::error::{Error, Result};
use crate::numerics::{squared_euclidean_unchecked, DenseMatrix, SeededRng};

#[derive(Debug, Clone)]
pub struct KMeansParams {
    pub k: usize,
    pub max_iter: usize,
    /// Relative centroid-shift stop; 0 demands bitwise-stable centroids.
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for KMeansParams {
    fn default() -> Self {
        Self {
            k: 3,
            max_iter: 300,
            tol: 1e-6,
            seed: 0,
            restarts: 1,
        }
    }
}

/// Assigns every row of `x` to its nearest centroid, ties toward the
/// lowest centroid index.
pub fn assign_points(x: &DenseMatrix, centroids: &DenseMatrix) -> Result<Vec<usize>> {
    if centroids.rows() == 0 {
        return Err(Error::Parameter("no centroids to assign to".into()));
    }
    if centroids.cols() != x.cols() {
        return Err(Error::DimensionMismatch {
            expected: x.cols(),
            got: centroids.cols(),
        });
    }
    let mut labels = vec![0usize; x.rows()];
    labels.par_iter_mut().enumerate().for_each(|(i, out)| {
        let row = x.row(i);
        let mut best = 0usize;
        let mut best_d = squared_euclidean_unchecked(row, centroids.row(0));
        for c in 1..centroids.rows() {
            let d = squared_euclidean_unchecked(row, centroids.row(c));
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        *out = best;
    });
    Ok(labels)
}

/// Recomputes centroids as member means. An empty cluster is reseeded to
/// the point farthest from its nearest non-empty centroid, ties to the
/// lowest point index; already-claimed reseed points are skipped.
pub fn update_centroids(x: &DenseMatrix, labels: &[usize], k: usize) -> DenseMatrix {
    let d = x.cols();
    let mut sums = DenseMatrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for (i, &label) in labels.iter().enumerate() {
        counts[label] += 1;
        let row = x.row(i);
        let target = sums.row_mut(label);
        for (t, v) in target.iter_mut().zip(row) {
            *t += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            let count = counts[c] as f64;
            for v in sums.row_mut(c) {
                *v /= count;
            }
        }
    }
    let empty: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
    if !empty.is_empty() {
        let filled: Vec<usize> = (0..k).filter(|&c| counts[c] > 0).collect();
        let mut claimed = vec![false; x.rows()];
        for c in empty {
            let mut far_i = 0usize;
            let mut far_d = -1.0;
            for i in 0..x.rows() {
                if claimed[i] {
                    continue;
                }
                let row = x.row(i);
                let mut nearest = f64::INFINITY;
                for &f in &filled {
                    let d = squared_euclidean_unchecked(row, sums.row(f));
                    if d < nearest {
                        nearest = d;
                    }
                }
                if nearest > far_d {
                    far_d = nearest;
                    far_i = i;
                }
            }
            claimed[far_i] = true;
            let src = x.row(far_i).to_vec();
            sums.row_mut(c).copy_from_slice(&src);
        }
    }
    sums
}

/// Runs Lloyd's algorithm. With `restarts > 1` the restart with the lowest
/// inertia wins, ties broken by the lowest restart index.
pub fn kmeans_fit(x: &DenseMatrix, params: &KMeansParams) -> Result<Assignment> {
    kmeans_fit_traced(x, params).map(|(a, _)| a)
}

/// Like [`kmeans_fit`], additionally returning the per-iteration inertia
/// trace of every restart.
pub fn kmeans_fit_traced(
    x: &DenseMatrix,
    params: &KMeansParams,
) -> Result<(Assignment, Vec<Vec<f64>>)> {
    let n = x.rows();
    if params.k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if n < params.k {
        return Err(Error::Parameter(format!(
            "k-means needs at least k={} rows, got {n}",
            params.k
        )));
    }
    if params.max_iter == 0 {
        return Err(Error::Parameter("max_iter must be at least 1".into()));
    }
    if !(params.tol >= 0.0) {
        return Err(Error::Parameter("tol must be non-negative".into()));
    }
    if params.restarts == 0 {
        return Err(Error::Parameter("restarts must be at least 1".into()));
    }

    let start = Instant::now();
    let mut rng = SeededRng::new(params.seed);
    let mut best: Option<(f64, Vec<usize>, usize, bool)> = None;
    let mut traces = Vec::with_capacity(params.restarts);

    for _restart in 0..params.restarts {
        let init = rng.sample_indices(n, params.k);
        let mut centroids = x.select_rows(&init);
        let mut trace = Vec::new();
        let mut converged = false;
        let mut iterations = 0;
        for it in 1..=params.max_iter {
            iterations = it;
            let labels = assign_points(x, &centroids)?;
            trace.push(inertia_of(x, &labels, &centroids));
            let next = update_centroids(x, &labels, params.k);
            let shift = max_relative_shift(&centroids, &next);
            centroids = next;
            if shift <= params.tol {
                converged = true;
                break;
            }
        }
        let labels = assign_points(x, &centroids)?;
        let inertia = inertia_of(x, &labels, &centroids);
        trace.push(inertia);
        traces.push(trace);
        let better = match &best {
            None => true,
            Some((best_inertia, ..)) => inertia < *best_inertia,
        };
        if better {
            best = Some((inertia, labels, iterations, converged));
        }
    }

    let (inertia, labels, iterations, converged) = best.expect("at least one restart ran");
    Ok((
        Assignment {
            labels,
            k: params.k,
            exemplars: None,
            iterations,
            converged,
            inertia: Some(inertia),
            net_similarity: None,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            algorithm: Algorithm::KMeans,
            seed: params.seed,
            warning: None,
        },
        traces,
    ))
}

fn inertia_of(x: &DenseMatrix, labels: &[usize], centroids: &DenseMatrix) -> f64 {
    let mut sum = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        sum += squared_euclidean_unchecked(x.row(i), centroids.row(label));
    }
    sum
}

fn max_relative_shift(old: &DenseMatrix, new: &DenseMatrix) -> f64 {
    let mut max = 0.0f64;
    for c in 0..old.rows() {
        let shift = squared_euclidean_unchecked(old.row(c), new.row(c)).sqrt();
        let norm = old.row(c).iter().map(|v| v * v).sum::<f64>().sqrt();
        let rel = shift / norm.max(f64::MIN_POSITIVE);
        if rel > max {
            max = rel;
        }
    }
    max
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points_1d(vals: &[f64]) -> DenseMatrix {
        DenseMatrix::from_vec(vals.len(), 1, vals.to_vec()).unwrap()
    }

    #[test]
    fn two_pairs_split_optimally() {
        let x = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let params = KMeansParams {
            k: 2,
            restarts: 10,
            seed: 3,
            ..KMeansParams::default()
        };
        let a = kmeans_fit(&x, &params).unwrap();
        assert_eq!(a.labels[0], a.labels[1]);
        assert_eq!(a.labels[2], a.labels[3]);
        assert_ne!(a.labels[0], a.labels[2]);
        assert!((a.inertia.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_gives_zero_inertia() {
        let x = points_1d(&[0.0, 5.0, 9.0]);
        let params = KMeansParams {
            k: 3,
            seed: 1,
            ..KMeansParams::default()
        };
        let a = kmeans_fit(&x, &params).unwrap();
        assert_eq!(a.inertia.unwrap(), 0.0);
        let mut sorted = a.labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 3);
    }

    #[test]
    fn identical_points_converge_immediately() {
        let x = points_1d(&[4.0, 4.0, 4.0]);
        let params = KMeansParams {
            k: 1,
            seed: 2,
            ..KMeansParams::default()
        };
        let a = kmeans_fit(&x, &params).unwrap();
        assert!(a.converged);
        assert_eq!(a.iterations, 1);
        assert_eq!(a.inertia.unwrap(), 0.0);
    }

    #[test]
    fn rows_below_k_is_error() {
        let x = points_1d(&[1.0, 2.0]);
        let params = KMeansParams {
            k: 3,
            ..KMeansParams::default()
        };
        assert!(kmeans_fit(&x, &params).is_err());
    }

    #[test]
    fn tie_breaks_toward_lowest_centroid() {
        let x = points_1d(&[5.0]);
        let centroids = points_1d(&[0.0, 99.0, 10.0]);
        let labels = assign_points(&x, &centroids).unwrap();
        assert_eq!(labels, vec![0]); // equidistant from centroids 0 and 2
    }

    #[test]
    fn single_centroid_labels_all_zero() {
        let x = points_1d(&[1.0, 2.0, 3.0]);
        let centroids = points_1d(&[0.0]);
        assert_eq!(assign_points(&x, &centroids).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn assignment_matches_bruteforce_scan() {
        let mut rng = SeededRng::new(8);
        let xv: Vec<f64> = (0..40).map(|_| rng.next_f64() * 10.0).collect();
        let cv: Vec<f64> = (0..8).map(|_| rng.next_f64() * 10.0).collect();
        let x = DenseMatrix::from_vec(20, 2, xv).unwrap();
        let c = DenseMatrix::from_vec(4, 2, cv).unwrap();
        let labels = assign_points(&x, &c).unwrap();
        for i in 0..20 {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for j in 0..4 {
                let mut d = 0.0;
                for t in 0..2 {
                    let delta = x.get(i, t) - c.get(j, t);
                    d += delta * delta;
                }
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            assert_eq!(labels[i], best);
        }
    }

    #[test]
    fn centroid_is_member_mean() {
        let x = points_1d(&[0.0, 1.0]);
        let c = update_centroids(&x, &[0, 0], 1);
        assert_eq!(c.get(0, 0), 0.5);
    }

    #[test]
    fn empty_cluster_reseeds_to_farthest() {
        let x = points_1d(&[0.0, 100.0]);
        // both points in cluster 0 whose mean is 50, but force the mean to 0
        // by labeling only point 0; cluster 1 left empty
        let c = update_centroids(&x, &[0, 0], 2);
        // cluster 0 mean = 50, farthest point from it is 0 or 100 (tie -> 0)
        assert_eq!(c.get(0, 0), 50.0);
        assert_eq!(c.get(1, 0), 0.0);
        let c2 = update_centroids(&points_1d(&[0.0, 100.0]), &[0, 1], 2);
        assert_eq!(c2.get(0, 0), 0.0);
        assert_eq!(c2.get(1, 0), 100.0);
    }

    #[test]
    fn reseed_follows_farthest_rule() {
        // spec fixture: points {0, 100}, non-empty centroid lands at 0
        let x = points_1d(&[0.0, 0.0, 100.0]);
        // labels put only point 0 and 1 at cluster 0 (mean 0); cluster 1 empty
        let c = update_centroids(&x, &[0, 0, 0], 2);
        assert_eq!(c.get(0, 0), 100.0 / 3.0);
        // farthest from the filled centroid is 100
        assert_eq!(c.get(1, 0), 100.0);
    }

    #[test]
    fn seed_determinism() {
        let mut rng = SeededRng::new(21);
        let vals: Vec<f64> = (0..60).map(|_| rng.next_f64()).collect();
        let x = DenseMatrix::from_vec(30, 2, vals).unwrap();
        let p = KMeansParams {
            k: 3,
            seed: 40,
            restarts: 4,
            ..KMeansParams::default()
        };
        let a = kmeans_fit(&x, &p).unwrap();
        let b = kmeans_fit(&x, &p).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia.unwrap().to_bits(), b.inertia.unwrap().to_bits());
    }

    #[test]
    fn inertia_trace_is_monotone() {
        let mut rng = SeededRng::new(77);
        let vals: Vec<f64> = (0..100).map(|_| rng.next_f64() * 20.0).collect();
        let x = DenseMatrix::from_vec(50, 2, vals).unwrap();
        let p = KMeansParams {
            k: 4,
            seed: 5,
            restarts: 3,
            ..KMeansParams::default()
        };
        let (_, traces) = kmeans_fit_traced(&x, &p).unwrap();
        for trace in traces {
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{w:?}");
            }
        }
    }
}
