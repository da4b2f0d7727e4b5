//! Cluster-validity metrics, timing, the repeated-run benchmark protocol,
//! and the two-sample t-test.

mod bench;
mod metrics;
mod ttest;

pub use bench::{
    bench_runs_csv, bench_suite, metrics_report, AlgorithmMeans, BenchConfig, BenchRun,
    BenchSuite, MetricTTest, MetricValue, MetricsReport, SubsampleRecord, METRIC_NAMES,
};
pub use metrics::{
    calinski_harabasz, davies_bouldin, measure, silhouette, subsample_indices,
    DispersionBreakdown, SilhouetteBreakdown, Subsample,
};
pub use ttest::{
    paired_ttest, regularized_incomplete_beta, student_t_two_tailed_p, two_sample_ttest,
    TTestResult, ALT_HYPOTHESIS, NULL_HYPOTHESIS,
};
