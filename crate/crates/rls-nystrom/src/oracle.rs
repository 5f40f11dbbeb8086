//! Brute-force exact reference computations on small instances.
//!
//! Everything here favors transparency over speed: dense Gram matrices,
//! full symmetric eigendecompositions, explicit trace arithmetic. Instances
//! are hard-capped at n = 5000 so the eigensolves stay tractable. These are
//! the independent checks the statistical test suites compare against, so
//! none of them may share code with the sampling or factor-building paths.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::{self, EvalCounter, KernelSpec};
use crate::linalg;
use crate::nystrom::NystromFactors;
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::sync::OnceLock;

/// Hard cap on instance size for dense oracle computations.
pub const ORACLE_MAX_N: usize = 5000;

/// A fully materialized kernel matrix with lazily computed spectrum.
pub struct DenseKernel {
    k: Array2<f64>,
    eig: OnceLock<(Array1<f64>, Array2<f64>)>,
}

impl DenseKernel {
    /// Wrap an explicit symmetric PSD matrix.
    pub fn from_matrix(k: Array2<f64>) -> Result<Self> {
        let n = k.nrows();
        if n != k.ncols() {
            return Err(Error::invalid_argument("kernel matrix must be square"));
        }
        if n > ORACLE_MAX_N {
            return Err(Error::invalid_argument(format!(
                "oracle refuses n = {n} > {ORACLE_MAX_N}"
            )));
        }
        let asym = k
            .iter()
            .zip(k.t().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if asym > 1e-10 {
            return Err(Error::invalid_argument(format!(
                "kernel matrix is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        Ok(DenseKernel {
            k,
            eig: OnceLock::new(),
        })
    }

    /// Evaluate the full Gram matrix of a dataset.
    pub fn from_dataset(spec: &KernelSpec, data: &Dataset) -> Result<Self> {
        if data.n() > ORACLE_MAX_N {
            return Err(Error::invalid_argument(format!(
                "oracle refuses n = {} > {ORACLE_MAX_N}",
                data.n()
            )));
        }
        // Oracle work is off-budget; use a private counter.
        let counter = EvalCounter::new();
        let all: Vec<usize> = (0..data.n()).collect();
        let mut k = kernel::kernel_columns(spec, data, &all, &counter)?;
        linalg::symmetrize(&mut k);
        DenseKernel::from_matrix(k)
    }

    pub fn n(&self) -> usize {
        self.k.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.k
    }

    fn eig(&self) -> Result<&(Array1<f64>, Array2<f64>)> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let eig = linalg::sym_eigh(&self.k.view())?;
        let n = self.n();
        // Store descending to match the sigma_1 >= sigma_2 >= ... convention.
        let mut values = Array1::zeros(n);
        let mut vectors = Array2::zeros((n, n));
        for j in 0..n {
            values[j] = eig.values[n - 1 - j];
            vectors.column_mut(j).assign(&eig.vectors.column(n - 1 - j));
        }
        let trace = values.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        if values[n - 1] < -1e-8 * trace {
            return Err(Error::invalid_argument(format!(
                "kernel matrix is not PSD (min eigenvalue {:.3e})",
                values[n - 1]
            )));
        }
        Ok(self.eig.get_or_init(|| (values, vectors)))
    }

    /// Eigenvalues, nonincreasing, tiny negatives clamped to zero.
    pub fn eigenvalues(&self) -> Result<Array1<f64>> {
        let (values, _) = self.eig()?;
        Ok(values.mapv(|v| v.max(0.0)))
    }
}

/// Exact ridge leverage scores: the diagonal of `K (K + lambda I)^-1`,
/// computed through the eigendecomposition. All values land in [0, 1].
pub fn exact_ridge_scores(kernel: &DenseKernel, lambda: f64) -> Result<Array1<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::invalid_argument("ridge scores require lambda > 0"));
    }
    let (values, vectors) = kernel.eig()?;
    let n = kernel.n();
    let weights: Vec<f64> = values
        .iter()
        .map(|&s| {
            let s = s.max(0.0);
            s / (s + lambda)
        })
        .collect();
    let mut scores = Array1::zeros(n);
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let u = vectors[[i, j]];
            acc += u * u * weights[j];
        }
        scores[i] = acc.clamp(0.0, 1.0);
    }
    Ok(scores)
}

/// Exact ridge leverage scores through the second form
/// `b_i^T (B^T B + lambda I)^-1 b_i` with `B` from pivoted Cholesky.
/// Used to cross-check `exact_ridge_scores` on rank-deficient instances.
pub fn ridge_scores_via_cholesky(kernel: &DenseKernel, lambda: f64) -> Result<Array1<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::invalid_argument("ridge scores require lambda > 0"));
    }
    let trace: f64 = kernel.matrix().diag().sum();
    let (b, rank) = linalg::pivoted_cholesky(&kernel.matrix().view(), 1e-12 * trace.max(1e-300))?;
    let n = kernel.n();
    if rank == 0 {
        return Ok(Array1::zeros(n));
    }
    let mut g = b.t().dot(&b);
    for i in 0..rank {
        g[[i, i]] += lambda;
    }
    let chol = linalg::PsdCholesky::factor_with_jitter(&g.view(), lambda * 1e-12)?;
    let solved = chol.solve_rows(&b.view())?;
    let mut scores = Array1::zeros(n);
    for i in 0..n {
        scores[i] = b.row(i).dot(&solved.row(i)).clamp(0.0, 1.0);
    }
    Ok(scores)
}

/// Effective dimension: `tr(K (K + lambda I)^-1)`.
pub fn exact_deff(kernel: &DenseKernel, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::invalid_argument(
            "effective dimension requires lambda > 0",
        ));
    }
    let values = kernel.eigenvalues()?;
    Ok(values.iter().map(|&s| s / (s + lambda)).sum())
}

/// The tail-average ridge parameter `(1/k) * sum_{i>k} sigma_i(K)`.
pub fn lambda_for_k(kernel: &DenseKernel, k: usize) -> Result<f64> {
    let n = kernel.n();
    if k < 1 || k > n {
        return Err(Error::invalid_argument(format!(
            "lambda_for_k: k = {k} out of range [1, {n}]"
        )));
    }
    let values = kernel.eigenvalues()?;
    let tail: f64 = values.iter().skip(k).sum();
    let lambda = tail / k as f64;
    if lambda > 0.0 {
        debug_assert!(
            exact_deff(kernel, lambda)? <= 2.0 * k as f64 + 1e-8,
            "tail-average lambda must bound the effective dimension by 2k"
        );
    }
    Ok(lambda)
}

/// Largest-magnitude eigenvalue of `K - K_tilde` via dense eigensolve.
pub fn exact_spectral_error(kernel: &DenseKernel, factors: &NystromFactors) -> Result<f64> {
    let (max_e, min_e) = error_spectrum_bounds(kernel, factors)?;
    Ok(max_e.abs().max(min_e.abs()))
}

/// Extreme eigenvalues `(max, min)` of `K - K_tilde`. The minimum is what
/// certifies `K_tilde ⪯ K` up to floating point.
pub fn error_spectrum_bounds(kernel: &DenseKernel, factors: &NystromFactors) -> Result<(f64, f64)> {
    let n = kernel.n();
    if factors.n() != n {
        return Err(Error::invalid_argument("factors and kernel disagree on n"));
    }
    let approx = factors.dense_approximation();
    let diff = kernel.matrix() - &approx;
    let values = linalg::sym_eigvals(&diff.view())?;
    Ok((values[n - 1], values[0]))
}

/// Exact `||K - A||_2` for an explicit approximation matrix, via dense
/// symmetric eigensolve.
pub fn exact_spectral_norm_diff(kernel: &DenseKernel, approx: &Array2<f64>) -> Result<f64> {
    let n = kernel.n();
    if approx.dim() != (n, n) {
        return Err(Error::invalid_argument(
            "approximation shape must match the kernel",
        ));
    }
    let mut diff = kernel.matrix() - approx;
    linalg::symmetrize(&mut diff);
    let values = linalg::sym_eigvals(&diff.view())?;
    Ok(values[0].abs().max(values[n - 1].abs()))
}

/// Projection-cost preservation check from randomized rank-k projections.
///
/// Draws `trials` random rank-k orthogonal projections X and verifies
/// `tr(K - XKX) <= tr(K_tilde - X K_tilde X) + c <= (1 + eps) tr(K - XKX)`
/// with `c = tr(K) - tr(K_tilde)` and 1e-6 slack. Pass `eps = f64::INFINITY`
/// to disable the upper check. Returns the fraction of projections passing.
pub fn pcp_check(
    kernel: &DenseKernel,
    factors: &NystromFactors,
    k: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let n = kernel.n();
    if k >= n {
        return Err(Error::invalid_argument("pcp_check requires k < n"));
    }
    if factors.n() != n {
        return Err(Error::invalid_argument("factors and kernel disagree on n"));
    }
    let trace_k: f64 = kernel.matrix().diag().sum();
    let trace_kt = factors.trace_approximation();
    let c = trace_k - trace_kt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0usize;
    for _ in 0..trials {
        let gauss = Array2::from_shape_fn((n, k), |_| rng.sample::<f64, _>(StandardNormal));
        let q = linalg::orthonormal_columns(&gauss.view())?;
        // tr(X M X) = tr(Q^T M Q) for X = Q Q^T.
        let kq = kernel.matrix().dot(&q);
        let tr_xkx: f64 = (0..k).map(|j| q.column(j).dot(&kq.column(j))).sum();
        let tr_xktx = factors.projected_trace(&q);
        let lhs = trace_k - tr_xkx;
        let mid = trace_kt - tr_xktx + c;
        let ok_lower = lhs <= mid + 1e-6;
        let ok_upper = !epsilon.is_finite() || mid <= (1.0 + epsilon) * lhs + 1e-6;
        if ok_lower && ok_upper {
            passed += 1;
        }
    }
    Ok(passed as f64 / trials as f64)
}
