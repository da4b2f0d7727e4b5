//! Cluster-validity metrics: silhouette, Calinski-Harabasz, Davies-Bouldin.
//!
//! Distances here are plain Euclidean (square roots of the squared
//! distances the clustering algorithms use), matching the standard
//! definitions of the three scores.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{squared_euclidean_unchecked, DenseMatrix, SeededRng};

/// Subsample request: evaluate the metrics on `size` points drawn without
/// replacement by the seeded generator.
#[derive(Debug, Clone, Copy)]
pub struct Subsample {
    pub size: usize,
    pub seed: u64,
}

/// Per-sample silhouette terms plus the mean score.
#[derive(Debug, Clone)]
pub struct SilhouetteBreakdown {
    /// Mean intra-cluster distance per evaluated sample.
    pub a: Vec<f64>,
    /// Minimum over other clusters of the mean distance to that cluster.
    pub b: Vec<f64>,
    /// Per-sample silhouette values, each in [-1, 1].
    pub s: Vec<f64>,
    pub mean: f64,
    /// Indices (into the input matrix) of the evaluated samples, ascending.
    pub indices: Vec<usize>,
}

/// Dispersion terms behind the Calinski-Harabasz and Davies-Bouldin
/// scores. Calinski-Harabasz fills the two traces; Davies-Bouldin fills
/// the per-cluster scatters, centroid separations, and pairwise ratios.
#[derive(Debug, Clone, Default)]
pub struct DispersionBreakdown {
    pub between: f64,
    pub within: f64,
    pub scatter: Vec<f64>,
    pub separations: Vec<Vec<f64>>,
    pub ratios: Vec<Vec<f64>>,
}

/// Relabels to a dense `0..k` range preserving first-appearance order of
/// the original ids, and groups member positions per cluster.
fn dense_groups(labels: &[usize]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut map: Vec<Option<usize>> = Vec::new();
    let mut dense = Vec::with_capacity(labels.len());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        if l >= map.len() {
            map.resize(l + 1, None);
        }
        let id = *map[l].get_or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        dense.push(id);
        groups[id].push(i);
    }
    (dense, groups)
}

/// Draws the sorted evaluation indices for a metric subsample.
pub fn subsample_indices(n: usize, sub: Subsample) -> Vec<usize> {
    if sub.size >= n {
        return (0..n).collect();
    }
    let mut rng = SeededRng::new(sub.seed);
    let mut picked = rng.sample_indices(n, sub.size);
    picked.sort_unstable();
    picked
}

/// Mean silhouette with the per-sample breakdown. Labels are restricted to
/// the sample; singleton clusters contribute a score of zero.
pub fn silhouette(
    x: &DenseMatrix,
    labels: &[usize],
    subsample: Option<Subsample>,
) -> Result<SilhouetteBreakdown> {
    if labels.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: labels.len(),
        });
    }
    let indices = match subsample {
        Some(sub) => subsample_indices(x.rows(), sub),
        None => (0..x.rows()).collect(),
    };
    let m = indices.len();
    if m == 0 {
        return Err(Error::EmptyInput("no points to evaluate".into()));
    }
    let sampled_labels: Vec<usize> = indices.iter().map(|&i| labels[i]).collect();
    let (dense, groups) = dense_groups(&sampled_labels);
    let k = groups.len();
    if k < 2 {
        return Err(Error::UndefinedMetric(
            "silhouette needs at least 2 clusters among the evaluated points".into(),
        ));
    }

    // Euclidean distances within the sample
    let mut dist = DenseMatrix::zeros(m, m);
    dist.par_rows_mut().enumerate().for_each(|(p, row)| {
        let rp = x.row(indices[p]);
        for (q, slot) in row.iter_mut().enumerate() {
            if p != q {
                *slot = squared_euclidean_unchecked(rp, x.row(indices[q])).sqrt();
            }
        }
    });

    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    let mut s = vec![0.0; m];
    for p in 0..m {
        let own = dense[p];
        let mut cluster_means = vec![0.0f64; k];
        for (c, group) in groups.iter().enumerate() {
            let mut sum = 0.0;
            let mut count = 0usize;
            for &q in group {
                if q != p {
                    sum += dist.get(p, q);
                    count += 1;
                }
            }
            cluster_means[c] = if count > 0 { sum / count as f64 } else { 0.0 };
        }
        if groups[own].len() <= 1 {
            // singleton: defined to score zero
            a[p] = 0.0;
            b[p] = other_min(&cluster_means, own);
            s[p] = 0.0;
            continue;
        }
        a[p] = cluster_means[own];
        b[p] = other_min(&cluster_means, own);
        let denom = a[p].max(b[p]);
        s[p] = if denom > 0.0 { (b[p] - a[p]) / denom } else { 0.0 };
    }
    let mean = s.iter().sum::<f64>() / m as f64;
    Ok(SilhouetteBreakdown {
        a,
        b,
        s,
        mean,
        indices,
    })
}

fn other_min(means: &[f64], own: usize) -> f64 {
    let mut best = f64::INFINITY;
    for (c, &v) in means.iter().enumerate() {
        if c != own && v < best {
            best = v;
        }
    }
    best
}

/// Variance-ratio score `(B/(k-1)) / (W/(n-k))`. Zero within-cluster
/// dispersion with separated centroids is reported as `+inf` (a perfect
/// score); callers serialize that case as a note.
pub fn calinski_harabasz(x: &DenseMatrix, labels: &[usize]) -> Result<(f64, DispersionBreakdown)> {
    if labels.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: labels.len(),
        });
    }
    let n = x.rows();
    let (dense, groups) = dense_groups(labels);
    let k = groups.len();
    if k < 2 || k >= n {
        return Err(Error::UndefinedMetric(format!(
            "calinski-harabasz needs 2 <= k < n, got k={k}, n={n}"
        )));
    }
    let global = column_mean(x, None);
    let centroids: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| column_mean(x, Some(g)))
        .collect();

    let mut between = 0.0;
    for (c, centroid) in centroids.iter().enumerate() {
        between += groups[c].len() as f64 * squared_euclidean_unchecked(centroid, &global);
    }
    let mut within = 0.0;
    for (i, &c) in dense.iter().enumerate() {
        within += squared_euclidean_unchecked(x.row(i), &centroids[c]);
    }

    let breakdown = DispersionBreakdown {
        between,
        within,
        ..DispersionBreakdown::default()
    };
    if within == 0.0 {
        if between > 0.0 {
            return Ok((f64::INFINITY, breakdown));
        }
        return Err(Error::UndefinedMetric(
            "calinski-harabasz undefined: zero between- and within-cluster dispersion".into(),
        ));
    }
    let score = (between / (k as f64 - 1.0)) / (within / (n as f64 - k as f64));
    Ok((score, breakdown))
}

/// Mean over clusters of the worst `(S_i + S_j) / d_ij` ratio. Coincident
/// centroids of distinct clusters make the score undefined.
pub fn davies_bouldin(x: &DenseMatrix, labels: &[usize]) -> Result<(f64, DispersionBreakdown)> {
    if labels.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: labels.len(),
        });
    }
    let n = x.rows();
    let (_, groups) = dense_groups(labels);
    let k = groups.len();
    if k < 2 || k > n {
        return Err(Error::UndefinedMetric(format!(
            "davies-bouldin needs 2 <= k <= n, got k={k}, n={n}"
        )));
    }
    let centroids: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| column_mean(x, Some(g)))
        .collect();
    let scatter: Vec<f64> = groups
        .iter()
        .enumerate()
        .map(|(c, g)| {
            let mut sum = 0.0;
            for &i in g {
                sum += squared_euclidean_unchecked(x.row(i), &centroids[c]).sqrt();
            }
            sum / g.len() as f64
        })
        .collect();

    let mut separations = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let d = squared_euclidean_unchecked(&centroids[i], &centroids[j]).sqrt();
            if d == 0.0 {
                return Err(Error::UndefinedMetric(format!(
                    "davies-bouldin undefined: clusters {i} and {j} have coincident centroids"
                )));
            }
            separations[i][j] = d;
            separations[j][i] = d;
        }
    }
    let mut ratios = vec![vec![0.0; k]; k];
    let mut score = 0.0;
    for i in 0..k {
        let mut worst = 0.0f64;
        for j in 0..k {
            if i != j {
                let r = (scatter[i] + scatter[j]) / separations[i][j];
                ratios[i][j] = r;
                if r > worst {
                    worst = r;
                }
            }
        }
        score += worst;
    }
    score /= k as f64;

    Ok((
        score,
        DispersionBreakdown {
            between: 0.0,
            within: 0.0,
            scatter,
            separations,
            ratios,
        },
    ))
}

fn column_mean(x: &DenseMatrix, members: Option<&[usize]>) -> Vec<f64> {
    let d = x.cols();
    let mut sum = vec![0.0; d];
    let count = match members {
        Some(g) => {
            for &i in g {
                for (s, v) in sum.iter_mut().zip(x.row(i)) {
                    *s += v;
                }
            }
            g.len()
        }
        None => {
            for row in x.row_iter() {
                for (s, v) in sum.iter_mut().zip(row) {
                    *s += v;
                }
            }
            x.rows()
        }
    };
    let inv = 1.0 / count as f64;
    sum.iter_mut().for_each(|s| *s *= inv);
    sum
}

/// Wall-clock duration of a thunk, in seconds.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}
