//! Kernel Nystrom approximation by recursive ridge-leverage-score sampling.
//!
//! The toolkit selects landmark points by approximate ridge leverage
//! scores estimated from a recursively halved subsample, so building a
//! rank-s approximation of an n x n kernel matrix costs O(ns) kernel
//! evaluations and O(ns^2) arithmetic, with spectral-error guarantees that
//! hold for any positive semidefinite kernel. It ships the classic
//! baselines (uniform landmarks, random Fourier features), downstream
//! solvers (kernel ridge regression, feature-space k-means and PCA), a
//! brute-force oracle for verification, and a benchmark CLI.
//!
//! Start with the runnable programs under `examples/`:
//!
//! * `landmark_sampling` — recursive score-based landmark selection
//! * `kernel_approximation` — error/evaluation-budget comparison of
//!   sampling methods
//! * `ridge_regression` — approximate kernel ridge regression end to end
//! * `clustering_and_pca` — linear algorithms on the Nystrom feature map
//! * `evaluation_budget` — kernel-evaluation scaling across dataset sizes
//! * `datasets` — CSV/libsvm loading and standardization

// `!(x > 0.0)` guards intentionally reject NaN along with nonpositives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod baselines;
pub mod cli;
pub mod data;
pub mod downstream;
pub mod error;
pub mod kernel;
mod linalg;
pub mod nystrom;
pub mod oracle;
pub mod sampler;
pub mod synthetic;

pub use data::{load_csv, load_libsvm, preprocess, Dataset, PreprocessReport};
pub use error::{Error, Result};
pub use kernel::{EvalCounter, KernelSpec};
pub use nystrom::{build_factors, estimate_spectral_error, NystromFactors};
pub use sampler::{
    accelerated_cap, bernoulli_select, probabilities, recursive_rls_fixed_lambda,
    recursive_rls_fixed_size, scores_from_sample, LandmarkSample, OversamplingRule, RidgeScores,
    SamplerConfig, SamplingMode,
};
