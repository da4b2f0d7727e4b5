//! Feature extraction: TF-IDF vectorization and PCA reduction.

mod eigen;
mod pca;
mod tfidf;

pub use pca::{fit_pca, pca_project, FeatureMatrix, PcaModel};
pub use tfidf::{build_vocabulary, idf, tfidf_transform, TermInfo, TfidfParams, Vocabulary};
