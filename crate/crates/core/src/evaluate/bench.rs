//! The repeated-run benchmark protocol: R seeded runs per algorithm,
//! shared per-run metric subsamples, and per-metric t-tests comparing
//! K-means against the AP+AHC hybrid.

use serde::{Deserialize, Serialize};

use crate::affinity::{ap_fit, ApParams};
use crate::assignment::{Algorithm, Assignment};
use crate::error::{Error, Result};
use crate::evaluate::metrics::{
    calinski_harabasz, davies_bouldin, silhouette, subsample_indices, Subsample,
};
use crate::evaluate::ttest::{paired_ttest, two_sample_ttest, TTestResult};
use crate::hierarchy::{ap_ahc_pipeline, AhcParams};
use crate::kmeans::{kmeans_fit, KMeansParams};
use crate::numerics::DenseMatrix;

/// One metric value in a report: a number, or a note explaining why the
/// number is absent (undefined, or infinite "perfect" separation).
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct MetricValue {
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MetricValue {
    fn finite(v: f64) -> Self {
        MetricValue {
            value: Some(v),
            note: None,
        }
    }

    fn noted(note: String) -> Self {
        MetricValue {
            value: None,
            note: Some(note),
        }
    }

    fn from_result(r: Result<f64>) -> Self {
        match r {
            Ok(v) if v.is_finite() => Self::finite(v),
            Ok(_) => Self::noted("perfect separation: zero within-cluster dispersion".into()),
            Err(e) => Self::noted(e.to_string()),
        }
    }
}

/// The metric subsample actually used, recorded so scores can be
/// recomputed exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsampleRecord {
    pub size: usize,
    pub seed: u64,
    pub indices: Vec<usize>,
}

/// Scores, timing, and run metadata for one clustering run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub n_points: usize,
    pub n_clusters: usize,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net_similarity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exemplars: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub silhouette: MetricValue,
    pub calinski_harabasz: MetricValue,
    pub davies_bouldin: MetricValue,
    /// Wall-clock fit time. The one field that legitimately differs
    /// between reruns of an otherwise deterministic pipeline.
    pub elapsed_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsample: Option<SubsampleRecord>,
}

/// Evaluates all three metrics for an assignment, on a shared subsample
/// when `subsample` is given.
pub fn metrics_report(
    x: &DenseMatrix,
    assignment: &Assignment,
    subsample: Option<Subsample>,
) -> MetricsReport {
    let n = x.rows();
    let (eval_x, eval_labels, record) = match subsample {
        Some(sub) if sub.size < n => {
            let indices = subsample_indices(n, sub);
            let labels: Vec<usize> = indices.iter().map(|&i| assignment.labels[i]).collect();
            (
                x.select_rows(&indices),
                labels,
                Some(SubsampleRecord {
                    size: indices.len(),
                    seed: sub.seed,
                    indices,
                }),
            )
        }
        _ => (x.clone(), assignment.labels.clone(), None),
    };

    let sil = MetricValue::from_result(
        silhouette(&eval_x, &eval_labels, None).map(|b| b.mean),
    );
    let ch = MetricValue::from_result(calinski_harabasz(&eval_x, &eval_labels).map(|(s, _)| s));
    let db = MetricValue::from_result(davies_bouldin(&eval_x, &eval_labels).map(|(s, _)| s));

    let mut distinct = eval_labels.clone();
    distinct.sort_unstable();
    distinct.dedup();

    MetricsReport {
        algorithm: assignment.algorithm,
        seed: assignment.seed,
        n_points: n,
        n_clusters: distinct.len(),
        iterations: assignment.iterations,
        converged: assignment.converged,
        inertia: assignment.inertia,
        net_similarity: assignment.net_similarity,
        exemplars: assignment.exemplars.clone(),
        warning: assignment.warning.clone(),
        silhouette: sil,
        calinski_harabasz: ch,
        davies_bouldin: db,
        elapsed_seconds: assignment.elapsed_seconds,
        subsample: record,
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub runs: usize,
    pub base_seed: u64,
    /// Per-run metric subsample size (capped at n).
    pub metric_subsample: usize,
    pub algorithms: Vec<Algorithm>,
    pub kmeans: KMeansParams,
    pub ap: ApParams,
    pub ahc: AhcParams,
    /// Use the paired t-test instead of the pooled two-sample test.
    pub paired: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            runs: 13,
            base_seed: 0,
            metric_subsample: 5000,
            algorithms: vec![Algorithm::KMeans, Algorithm::ApAhc],
            kmeans: KMeansParams::default(),
            ap: ApParams::default(),
            ahc: AhcParams::default(),
            paired: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRun {
    pub run: usize,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub report: MetricsReport,
}

/// One metric's t-test row (K-means sample vs AP+AHC sample).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricTTest {
    pub metric: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<TTestResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Per-algorithm means over the runs (None when every run was undefined).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmMeans {
    pub algorithm: Algorithm,
    pub silhouette: Option<f64>,
    pub calinski_harabasz: Option<f64>,
    pub davies_bouldin: Option<f64>,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchSuite {
    pub r: usize,
    pub base_seed: u64,
    pub runs: Vec<BenchRun>,
    pub means: Vec<AlgorithmMeans>,
    pub ttests: Vec<MetricTTest>,
}

pub const METRIC_NAMES: [&str; 3] = [
    "Silhouette Score",
    "Calinski-Harabasz Score",
    "Davies-Bouldin Index",
];

/// Runs every configured algorithm `runs` times with seeds
/// `base_seed + 1 ..= base_seed + runs`; within a run all algorithms share
/// one metric subsample. Algorithms run sequentially so the timing
/// measurements are uncontended.
pub fn bench_suite(x: &DenseMatrix, cfg: &BenchConfig) -> Result<BenchSuite> {
    if cfg.runs < 2 {
        return Err(Error::Parameter(format!(
            "benchmark needs at least 2 runs for the t-test, got {}",
            cfg.runs
        )));
    }
    if cfg.algorithms.is_empty() {
        return Err(Error::Parameter("no algorithms configured".into()));
    }
    let mut rows = Vec::with_capacity(cfg.runs * cfg.algorithms.len());
    for run in 1..=cfg.runs {
        let seed = cfg.base_seed.wrapping_add(run as u64);
        let subsample = Subsample {
            size: cfg.metric_subsample.min(x.rows()),
            seed,
        };
        for &algorithm in &cfg.algorithms {
            let assignment = run_algorithm(x, algorithm, seed, cfg)?;
            let report = metrics_report(x, &assignment, Some(subsample));
            rows.push(BenchRun {
                run,
                algorithm,
                seed,
                report,
            });
        }
    }

    let means = cfg
        .algorithms
        .iter()
        .map(|&algorithm| algorithm_means(&rows, algorithm))
        .collect();

    let ttests = metric_ttests(&rows, cfg.paired);
    Ok(BenchSuite {
        r: cfg.runs,
        base_seed: cfg.base_seed,
        runs: rows,
        means,
        ttests,
    })
}

fn run_algorithm(
    x: &DenseMatrix,
    algorithm: Algorithm,
    seed: u64,
    cfg: &BenchConfig,
) -> Result<Assignment> {
    match algorithm {
        Algorithm::KMeans => kmeans_fit(
            x,
            &KMeansParams {
                seed,
                ..cfg.kmeans.clone()
            },
        ),
        Algorithm::Ap => ap_fit(
            x,
            &ApParams {
                seed,
                ..cfg.ap.clone()
            },
        ),
        Algorithm::ApAhc => ap_ahc_pipeline(
            x,
            &ApParams {
                seed,
                ..cfg.ap.clone()
            },
            &cfg.ahc,
        ),
    }
}

fn metric_values(rows: &[BenchRun], algorithm: Algorithm, metric: usize) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.algorithm == algorithm)
        .filter_map(|r| match metric {
            0 => r.report.silhouette.value,
            1 => r.report.calinski_harabasz.value,
            _ => r.report.davies_bouldin.value,
        })
        .collect()
}

fn algorithm_means(rows: &[BenchRun], algorithm: Algorithm) -> AlgorithmMeans {
    let mean_of = |vs: &[f64]| {
        if vs.is_empty() {
            None
        } else {
            Some(vs.iter().sum::<f64>() / vs.len() as f64)
        }
    };
    let elapsed: Vec<f64> = rows
        .iter()
        .filter(|r| r.algorithm == algorithm)
        .map(|r| r.report.elapsed_seconds)
        .collect();
    AlgorithmMeans {
        algorithm,
        silhouette: mean_of(&metric_values(rows, algorithm, 0)),
        calinski_harabasz: mean_of(&metric_values(rows, algorithm, 1)),
        davies_bouldin: mean_of(&metric_values(rows, algorithm, 2)),
        elapsed_seconds: elapsed.iter().sum::<f64>() / elapsed.len().max(1) as f64,
    }
}

fn metric_ttests(rows: &[BenchRun], paired: bool) -> Vec<MetricTTest> {
    METRIC_NAMES
        .iter()
        .enumerate()
        .map(|(metric, name)| {
            let xs = metric_values(rows, Algorithm::KMeans, metric);
            let ys = metric_values(rows, Algorithm::ApAhc, metric);
            if xs.len() < 2 || ys.len() < 2 {
                return MetricTTest {
                    metric: (*name).to_string(),
                    result: None,
                    note: Some(
                        "needs at least 2 defined values per algorithm (did the bench \
                         include both kmeans and ap-ahc?)"
                            .into(),
                    ),
                };
            }
            let outcome = if paired {
                paired_ttest(&xs, &ys)
            } else {
                two_sample_ttest(&xs, &ys)
            };
            match outcome {
                Ok(result) => MetricTTest {
                    metric: (*name).to_string(),
                    result: Some(result),
                    note: None,
                },
                Err(e) => MetricTTest {
                    metric: (*name).to_string(),
                    result: None,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Per-run CSV of the suite
/// (`run,algorithm,seed,n_points,n_clusters,silhouette,calinski_harabasz,davies_bouldin,elapsed_seconds`).
pub fn bench_runs_csv(suite: &BenchSuite) -> String {
    let mut out = String::from(
        "run,algorithm,seed,n_points,n_clusters,silhouette,calinski_harabasz,davies_bouldin,elapsed_seconds\n",
    );
    let fmt = |v: &MetricValue| v.value.map(|x| x.to_string()).unwrap_or_default();
    for r in &suite.runs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.run,
            r.algorithm.slug(),
            r.seed,
            r.report.n_points,
            r.report.n_clusters,
            fmt(&r.report.silhouette),
            fmt(&r.report.calinski_harabasz),
            fmt(&r.report.davies_bouldin),
            r.report.elapsed_seconds,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    fn blobs(n_per: usize, centers: &[f64], spread: f64, seed: u64) -> DenseMatrix {
        let mut rng = SeededRng::new(seed);
        let mut vals = Vec::new();
        for &c in centers {
            for _ in 0..n_per {
                vals.push(c + spread * (rng.next_f64() - 0.5));
                vals.push(c + spread * (rng.next_f64() - 0.5));
            }
        }
        DenseMatrix::from_vec(centers.len() * n_per, 2, vals).unwrap()
    }

    #[test]
    fn shape_contract_two_runs() {
        let x = blobs(6, &[0.0, 10.0, 20.0], 1.0, 4);
        let cfg = BenchConfig {
            runs: 2,
            metric_subsample: 1000,
            ..BenchConfig::default()
        };
        let suite = bench_suite(&x, &cfg).unwrap();
        assert_eq!(suite.runs.len(), 4); // 2 runs x 2 algorithms
        assert_eq!(suite.ttests.len(), 3);
        assert_eq!(suite.means.len(), 2);
        for row in &suite.runs {
            assert!(row.report.elapsed_seconds >= 0.0);
        }
        let csv = bench_runs_csv(&suite);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("run,algorithm,seed,"));
    }

    #[test]
    fn single_run_is_rejected() {
        let x = blobs(4, &[0.0, 9.0], 0.5, 1);
        let cfg = BenchConfig {
            runs: 1,
            ..BenchConfig::default()
        };
        assert!(bench_suite(&x, &cfg).is_err());
    }

    #[test]
    fn identical_outputs_give_t_zero_p_one() {
        // deterministic outputs across runs: compare ap-ahc against itself
        // by reusing its reports under both labels
        let x = blobs(5, &[0.0, 12.0], 0.4, 9);
        let cfg = BenchConfig {
            runs: 3,
            metric_subsample: 1000,
            ..BenchConfig::default()
        };
        let suite = bench_suite(&x, &cfg).unwrap();
        let mut rows = suite.runs.clone();
        // overwrite the kmeans rows with the ap-ahc reports
        let apahc: Vec<MetricsReport> = rows
            .iter()
            .filter(|r| r.algorithm == Algorithm::ApAhc)
            .map(|r| r.report.clone())
            .collect();
        let mut it = apahc.iter();
        for row in rows.iter_mut() {
            if row.algorithm == Algorithm::KMeans {
                row.report = it.next().unwrap().clone();
            }
        }
        for tt in metric_ttests(&rows, false) {
            let r = tt.result.expect(&tt.metric);
            assert_eq!(r.t, 0.0, "{}", tt.metric);
            assert_eq!(r.p, 1.0);
        }
    }

    #[test]
    fn subsample_is_shared_and_recorded() {
        let x = blobs(40, &[0.0, 8.0], 1.0, 3);
        let cfg = BenchConfig {
            runs: 2,
            metric_subsample: 30,
            ..BenchConfig::default()
        };
        let suite = bench_suite(&x, &cfg).unwrap();
        for run in 1..=2 {
            let recs: Vec<&BenchRun> = suite.runs.iter().filter(|r| r.run == run).collect();
            let first = recs[0].report.subsample.as_ref().unwrap();
            for r in &recs[1..] {
                let sub = r.report.subsample.as_ref().unwrap();
                assert_eq!(sub.indices, first.indices);
                assert_eq!(sub.seed, first.seed);
            }
            assert_eq!(first.size, 30);
        }
    }

    #[test]
    fn metrics_report_roundtrips_scores() {
        let x = blobs(10, &[0.0, 6.0, 14.0], 1.2, 7);
        let cfg = BenchConfig {
            runs: 2,
            metric_subsample: 20,
            ..BenchConfig::default()
        };
        let suite = bench_suite(&x, &cfg).unwrap();
        for row in &suite.runs {
            let sub = row.report.subsample.as_ref().unwrap();
            // recompute from the stored indices; must match exactly
            let sx = x.select_rows(&sub.indices);
            let labels: Vec<usize> = {
                // labels are not stored in the report; re-run the algorithm
                let assignment = run_algorithm(
                    &x,
                    row.algorithm,
                    row.seed,
                    &cfg,
                )
                .unwrap();
                sub.indices.iter().map(|&i| assignment.labels[i]).collect()
            };
            let sil = silhouette(&sx, &labels, None).unwrap().mean;
            assert_eq!(sil.to_bits(), row.report.silhouette.value.unwrap().to_bits());
        }
    }
}
