//! Clustering output shared by all three algorithms.

use serde::{Deserialize, Serialize};

/// Which algorithm produced an assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    KMeans,
    #[serde(rename = "AP")]
    Ap,
    #[serde(rename = "APAHC")]
    ApAhc,
}

impl Algorithm {
    /// The CLI spelling: `kmeans`, `ap`, or `ap-ahc`.
    pub fn slug(&self) -> &'static str {
        match self {
            Algorithm::KMeans => "kmeans",
            Algorithm::Ap => "ap",
            Algorithm::ApAhc => "ap-ahc",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        match s {
            "kmeans" => Some(Algorithm::KMeans),
            "ap" => Some(Algorithm::Ap),
            "ap-ahc" => Some(Algorithm::ApAhc),
            _ => None,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}

/// Per-document cluster labels plus run metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Assignment {
    pub labels: Vec<usize>,
    pub k: usize,
    /// Exemplar document indices (AP family only).
    pub exemplars: Option<Vec<usize>>,
    pub iterations: usize,
    pub converged: bool,
    /// K-means objective.
    pub inertia: Option<f64>,
    /// AP objective.
    pub net_similarity: Option<f64>,
    pub elapsed_seconds: f64,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub warning: Option<String>,
}

impl Assignment {
    /// Number of distinct labels actually present.
    pub fn distinct_labels(&self) -> usize {
        let mut seen = vec![false; self.k.max(1)];
        let mut count = 0;
        for &l in &self.labels {
            if !seen[l] {
                seen[l] = true;
                count += 1;
            }
        }
        count
    }
}
