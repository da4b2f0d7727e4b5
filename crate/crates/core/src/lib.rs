//! Unsupervised tweet-clustering toolkit.
//!
//! The pipeline ingests two tweet CSV datasets, merges and cleans them into
//! a [`corpus::Corpus`], vectorizes with TF-IDF, reduces with PCA, clusters
//! with K-means, affinity propagation, or affinity propagation refined by
//! agglomerative hierarchical clustering, and evaluates the results with
//! silhouette, Calinski-Harabasz, and Davies-Bouldin scores plus a
//! two-sample t-test benchmark protocol.
//!
//! Every randomized step draws from [`numerics::SeededRng`], a fully
//! documented splitmix64 recipe, so equal seeds reproduce equal outputs
//! bit for bit across platforms and thread counts.

pub mod affinity;
pub mod assignment;
pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod hierarchy;
pub mod kmeans;
pub mod numerics;
pub mod synth;

pub use assignment::{Algorithm, Assignment};
pub use error::{Error, Result};
