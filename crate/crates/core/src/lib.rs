//! Optimum-path forest (OPF) classification and clustering, and the
//! OPF-based resampling methods for imbalanced binary datasets:
//! score-driven undersampling (OPF-US and variants), cluster-wise Gaussian
//! oversampling (O²PF and variants), and their hybrids, together with the
//! repeated-holdout evaluation harness used to compare them.

pub mod clustering;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod evaluation;
pub mod hybrid;
pub mod oversampling;
pub mod rng;
pub mod supervised;
pub mod undersampling;

pub use dataset::{Dataset, SplitSpec};
pub use distance::{Distance, Euclidean};
pub use error::{OpfError, Result};
pub use rng::{RandomSource, Rng};
