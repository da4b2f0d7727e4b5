//! Shared numeric foundations: matrix containers, distance kernels, and the
//! deterministic random generator.

mod distance;
mod matrix;
mod rng;

pub use distance::{pairwise_sq_distances, squared_euclidean};
pub(crate) use distance::squared_euclidean_unchecked;
pub use matrix::{DenseMatrix, SparseRowMatrix, DENSE_MAGIC, SPARSE_MAGIC};
pub use rng::SeededRng;
