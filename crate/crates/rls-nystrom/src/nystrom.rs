//! Building and applying the Nystrom approximation
//! `K_tilde = C W^+ C^T` with `C = K S` and `W = S^T K S`.
//!
//! Factors keep the approximation implicit: matrix-vector products cost
//! O(ns) and the explicit feature map gives an n x s embedding whose Gram
//! matrix is exactly `K_tilde`. Spectral error against the exact kernel is
//! estimated by power iteration on a bounded random subset, evaluating
//! kernel rows blockwise so at most `block_size * subset_size` entries are
//! ever materialized at once.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::{self, EvalCounter, KernelSpec};
use crate::linalg;
use crate::sampler::LandmarkSample;
use ndarray::{Array1, Array2};
use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::{Read, Write};

/// Rows processed at once when streaming kernel blocks in the error
/// estimator.
pub const ESTIMATOR_BLOCK_SIZE: usize = 2048;
/// Relative stagnation threshold that stops power iteration early.
pub const ESTIMATOR_STAGNATION: f64 = 1e-6;

const FACTORS_MAGIC: &[u8; 8] = b"RLSNYF01";

/// The Nystrom factors `C = K S` (selection unweighted) and
/// `Winv = (S^T K S)^+`, representing `K_tilde = C Winv C^T` implicitly.
#[derive(Debug, Clone)]
pub struct NystromFactors {
    c: Array2<f64>,
    winv: Array2<f64>,
    landmark_indices: Vec<usize>,
    rank: usize,
    kernel: KernelSpec,
}

impl NystromFactors {
    pub fn n(&self) -> usize {
        self.c.nrows()
    }

    pub fn s(&self) -> usize {
        self.c.ncols()
    }

    /// Effective rank after pseudoinverse truncation.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn landmark_indices(&self) -> &[usize] {
        &self.landmark_indices
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn columns(&self) -> &Array2<f64> {
        &self.c
    }

    pub fn winv(&self) -> &Array2<f64> {
        &self.winv
    }

    /// `K_tilde v = C (Winv (C^T v))` in O(ns) arithmetic.
    pub fn matvec(&self, v: &Array1<f64>) -> Result<Array1<f64>> {
        if v.len() != self.n() {
            return Err(Error::invalid_argument(format!(
                "matvec: vector length {} does not match n = {}",
                v.len(),
                self.n()
            )));
        }
        let t = self.c.t().dot(v);
        Ok(self.c.dot(&self.winv.dot(&t)))
    }

    /// Explicit n x s feature map `F = C (S^T K S)^{+/2}` with
    /// `F F^T = K_tilde`.
    pub fn feature_map(&self) -> Result<Array2<f64>> {
        let root = symmetric_psd_root(&self.winv)?;
        Ok(self.c.dot(&root))
    }

    /// Materialize `K_tilde` densely. Intended for oracle comparisons on
    /// small instances only.
    pub fn dense_approximation(&self) -> Array2<f64> {
        self.c.dot(&self.winv).dot(&self.c.t())
    }

    /// `tr(K_tilde)` without forming the dense matrix.
    pub fn trace_approximation(&self) -> f64 {
        let cw = self.c.dot(&self.winv);
        cw.iter().zip(self.c.iter()).map(|(a, b)| a * b).sum()
    }

    /// `tr(Q^T K_tilde Q)` for a thin orthonormal Q.
    pub fn projected_trace(&self, q: &Array2<f64>) -> f64 {
        let m = self.c.t().dot(q);
        let wm = self.winv.dot(&m);
        wm.iter().zip(m.iter()).map(|(a, b)| a * b).sum()
    }

    /// Serialize to a small versioned binary container.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(FACTORS_MAGIC)?;
        let kernel_str = self.kernel.to_string();
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        w.write_all(&(self.s() as u64).to_le_bytes())?;
        w.write_all(&(self.rank as u64).to_le_bytes())?;
        w.write_all(&(kernel_str.len() as u32).to_le_bytes())?;
        w.write_all(kernel_str.as_bytes())?;
        for &i in &self.landmark_indices {
            w.write_all(&(i as u64).to_le_bytes())?;
        }
        for v in self.c.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in self.winv.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != FACTORS_MAGIC {
            return Err(Error::invalid_argument(
                "not a factors container (bad magic)",
            ));
        }
        let mut u64buf = [0u8; 8];
        let mut read_u64 = |r: &mut dyn Read| -> Result<u64> {
            r.read_exact(&mut u64buf)?;
            Ok(u64::from_le_bytes(u64buf))
        };
        let n = read_u64(&mut r)? as usize;
        let s = read_u64(&mut r)? as usize;
        let rank = read_u64(&mut r)? as usize;
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let klen = u32::from_le_bytes(u32buf) as usize;
        let mut kbuf = vec![0u8; klen];
        r.read_exact(&mut kbuf)?;
        let kernel: KernelSpec = String::from_utf8(kbuf)
            .map_err(|_| Error::invalid_argument("bad kernel string in container"))?
            .parse()?;
        let mut landmark_indices = Vec::with_capacity(s);
        let mut buf8 = [0u8; 8];
        for _ in 0..s {
            r.read_exact(&mut buf8)?;
            landmark_indices.push(u64::from_le_bytes(buf8) as usize);
        }
        let read_matrix = |rows: usize, cols: usize, r: &mut dyn Read| -> Result<Array2<f64>> {
            let mut flat = Vec::with_capacity(rows * cols);
            let mut b = [0u8; 8];
            for _ in 0..rows * cols {
                r.read_exact(&mut b)?;
                flat.push(f64::from_le_bytes(b));
            }
            Ok(Array2::from_shape_vec((rows, cols), flat).expect("shape"))
        };
        let c = read_matrix(n, s, &mut r)?;
        let winv = read_matrix(s, s, &mut r)?;
        Ok(NystromFactors {
            c,
            winv,
            landmark_indices,
            rank,
            kernel,
        })
    }
}

/// Symmetric PSD square root with the same eigenvalue truncation used by the
/// pseudoinverse: negatives and round-off dust are zeroed.
fn symmetric_psd_root(a: &Array2<f64>) -> Result<Array2<f64>> {
    let eig = linalg::sym_eigh(&a.view())?;
    let max = eig.values.iter().cloned().fold(0.0f64, f64::max);
    let tol = a.nrows() as f64 * f64::EPSILON * max;
    let roots: Array1<f64> = eig.values.mapv(|v| if v > tol { v.sqrt() } else { 0.0 });
    let scaled = &eig.vectors * &roots;
    let mut out = scaled.dot(&eig.vectors.t());
    linalg::symmetrize(&mut out);
    Ok(out)
}

/// Build Nystrom factors from a landmark sample. Sample weights are
/// deliberately ignored: they do not affect the approximation. Costs exactly
/// `n * s` kernel evaluations; the s x s block is read back out of `C`.
pub fn build_factors(
    spec: &KernelSpec,
    data: &Dataset,
    sample: &LandmarkSample,
    counter: &EvalCounter,
) -> Result<NystromFactors> {
    if sample.is_empty() {
        return Err(Error::invalid_argument(
            "build_factors: empty landmark sample",
        ));
    }
    let indices = sample.indices();
    let c = kernel::kernel_columns(spec, data, indices, counter)?;
    let s = indices.len();
    let mut w = Array2::zeros((s, s));
    for (r, &i) in indices.iter().enumerate() {
        w.row_mut(r).assign(&c.row(i));
    }
    linalg::symmetrize(&mut w);
    let (winv, rank) = pseudoinverse_truncated(&w)?;
    Ok(NystromFactors {
        c,
        winv,
        landmark_indices: indices.to_vec(),
        rank,
        kernel: spec.clone(),
    })
}

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix with the
/// rank-revealing cutoff `s * eps * lambda_max`.
fn pseudoinverse_truncated(w: &Array2<f64>) -> Result<(Array2<f64>, usize)> {
    let s = w.nrows();
    let eig = linalg::sym_eigh(&w.view())?;
    let max = eig.values.iter().cloned().fold(0.0f64, f64::max);
    let tol = s as f64 * f64::EPSILON * max;
    let mut rank = 0usize;
    let inv: Array1<f64> = eig.values.mapv(|v| {
        if v > tol {
            rank += 1;
            1.0 / v
        } else {
            0.0
        }
    });
    let scaled = &eig.vectors * &inv;
    let mut winv = scaled.dot(&eig.vectors.t());
    linalg::symmetrize(&mut winv);
    Ok((winv, rank))
}

/// `K_tilde v` — free function mirror of [`NystromFactors::matvec`].
pub fn approx_matvec(factors: &NystromFactors, v: &Array1<f64>) -> Result<Array1<f64>> {
    factors.matvec(v)
}

enum LowRank<'a> {
    Nystrom(&'a NystromFactors),
    GramFactor(&'a Array2<f64>),
}

impl LowRank<'_> {
    /// Approximation restricted to `subset`, applied to a vector.
    fn sub_matvec(&self, subset: &[usize], v: &Array1<f64>) -> Array1<f64> {
        match self {
            LowRank::Nystrom(f) => {
                let c_sub = select_rows(&f.c, subset);
                let t = c_sub.t().dot(v);
                c_sub.dot(&f.winv.dot(&t))
            }
            LowRank::GramFactor(z) => {
                let z_sub = select_rows(z, subset);
                let t = z_sub.t().dot(v);
                z_sub.dot(&t)
            }
        }
    }
}

fn select_rows(a: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), a.ncols()));
    for (dst, &src) in rows.iter().enumerate() {
        out.row_mut(dst).assign(&a.row(src));
    }
    out
}

/// Power-iteration estimate of the spectral error `||K - K_tilde||_2`,
/// restricted to a seeded uniform subset of at most `subset_size` points.
pub fn estimate_spectral_error(
    spec: &KernelSpec,
    data: &Dataset,
    factors: &NystromFactors,
    subset_size: usize,
    iterations: usize,
    seed: u64,
) -> Result<f64> {
    estimate_error_low_rank(
        spec,
        data,
        LowRank::Nystrom(factors),
        subset_size,
        iterations,
        ESTIMATOR_BLOCK_SIZE,
        seed,
    )
}

/// As [`estimate_spectral_error`] with an explicit row-block size; the
/// estimator never materializes more than `block_size * subset_size` kernel
/// entries at once.
pub fn estimate_spectral_error_blocked(
    spec: &KernelSpec,
    data: &Dataset,
    factors: &NystromFactors,
    subset_size: usize,
    iterations: usize,
    block_size: usize,
    seed: u64,
) -> Result<f64> {
    estimate_error_low_rank(
        spec,
        data,
        LowRank::Nystrom(factors),
        subset_size,
        iterations,
        block_size,
        seed,
    )
}

/// Same estimator for an explicit Gram factor `Z` with `K_tilde = Z Z^T`
/// (e.g. random Fourier features).
pub fn estimate_spectral_error_gram_factor(
    spec: &KernelSpec,
    data: &Dataset,
    z: &Array2<f64>,
    subset_size: usize,
    iterations: usize,
    seed: u64,
) -> Result<f64> {
    if z.nrows() != data.n() {
        return Err(Error::invalid_argument(
            "gram factor row count must equal n",
        ));
    }
    estimate_error_low_rank(
        spec,
        data,
        LowRank::GramFactor(z),
        subset_size,
        iterations,
        ESTIMATOR_BLOCK_SIZE,
        seed,
    )
}

/// Gram-factor variant with an explicit block size.
pub fn estimate_spectral_error_gram_factor_blocked(
    spec: &KernelSpec,
    data: &Dataset,
    z: &Array2<f64>,
    subset_size: usize,
    iterations: usize,
    block_size: usize,
    seed: u64,
) -> Result<f64> {
    if z.nrows() != data.n() {
        return Err(Error::invalid_argument(
            "gram factor row count must equal n",
        ));
    }
    estimate_error_low_rank(
        spec,
        data,
        LowRank::GramFactor(z),
        subset_size,
        iterations,
        block_size,
        seed,
    )
}

fn estimate_error_low_rank(
    spec: &KernelSpec,
    data: &Dataset,
    approx: LowRank<'_>,
    subset_size: usize,
    iterations: usize,
    block_size: usize,
    seed: u64,
) -> Result<f64> {
    let n = data.n();
    if subset_size == 0 {
        return Err(Error::invalid_argument("subset_size must be positive"));
    }
    if subset_size > n {
        return Err(Error::invalid_argument(format!(
            "subset_size {subset_size} exceeds n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut subset: Vec<usize> = index_sample(&mut rng, n, subset_size).into_vec();
    subset.sort_unstable();
    let m = subset.len();

    if block_size == 0 {
        return Err(Error::invalid_argument("block_size must be positive"));
    }
    // Off-budget measurement work gets its own counter.
    let counter = EvalCounter::new();
    // When the whole subset fits in one block, compute its kernel once and
    // reuse it across iterations; this stays within the materialization cap.
    let cached = if m <= block_size {
        let mut k = kernel::kernel_cross(spec, data, &subset, &subset, &counter)?;
        linalg::symmetrize(&mut k);
        Some(k)
    } else {
        None
    };

    let exact_matvec = |v: &Array1<f64>| -> Result<Array1<f64>> {
        if let Some(k) = &cached {
            return Ok(k.dot(v));
        }
        let mut out = Array1::zeros(m);
        let mut start = 0usize;
        while start < m {
            let end = (start + block_size).min(m);
            let block_rows = &subset[start..end];
            let block = kernel::kernel_cross(spec, data, block_rows, &subset, &counter)?;
            let prod = block.dot(v);
            out.slice_mut(ndarray::s![start..end]).assign(&prod);
            start = end;
        }
        Ok(out)
    };

    let mut v = Array1::from_shape_fn(m, |_| rng.gen::<f64>() - 0.5);
    let norm = v.dot(&v).sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    v /= norm;
    let mut rayleigh = 0.0f64;
    for _ in 0..iterations {
        let w = exact_matvec(&v)? - approx.sub_matvec(&subset, &v);
        let next = v.dot(&w);
        let wn = w.dot(&w).sqrt();
        if wn <= f64::MIN_POSITIVE {
            return Ok(0.0);
        }
        let stagnated = (next - rayleigh).abs() <= ESTIMATOR_STAGNATION * next.abs();
        rayleigh = next;
        v = w / wn;
        if stagnated {
            break;
        }
    }
    Ok(rayleigh.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_spectral_error, DenseKernel};
    use crate::sampler::LandmarkSample;
    use ndarray::array;

    fn full_sample(n: usize) -> LandmarkSample {
        LandmarkSample::identity(n)
    }

    fn gaussian_cloud(n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let features = Array2::from_shape_fn((n, d), |_| rng.gen::<f64>() * 2.0 - 1.0);
        Dataset::new(features, None).unwrap()
    }

    #[test]
    fn full_sample_reproduces_kernel() {
        let data = gaussian_cloud(40, 3, 7);
        let spec = KernelSpec::gaussian(0.8).unwrap();
        let counter = EvalCounter::new();
        let factors = build_factors(&spec, &data, &full_sample(40), &counter).unwrap();
        assert_eq!(counter.count(), 40 * 40);
        let k = DenseKernel::from_dataset(&spec, &data).unwrap();
        let err = exact_spectral_error(&k, &factors).unwrap();
        let norm = k.eigenvalues().unwrap()[0];
        assert!(err <= 1e-8 * norm, "err={err} norm={norm}");
    }

    #[test]
    fn single_landmark_dominates_diagonal() {
        let data = gaussian_cloud(25, 2, 3);
        let spec = KernelSpec::gaussian(1.0).unwrap();
        let counter = EvalCounter::new();
        let sample = LandmarkSample::new(vec![4], vec![1.0]).unwrap();
        let factors = build_factors(&spec, &data, &sample, &counter).unwrap();
        assert_eq!(factors.rank(), 1);
        let approx = factors.dense_approximation();
        let k = DenseKernel::from_dataset(&spec, &data).unwrap();
        for i in 0..25 {
            assert!(approx[[i, i]] <= k.matrix()[[i, i]] + 1e-10);
        }
    }

    #[test]
    fn orthonormal_points_project_onto_selected_axes() {
        let data = Dataset::new(
            array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            None,
        )
        .unwrap();
        let counter = EvalCounter::new();
        let sample = LandmarkSample::new(vec![0, 1], vec![1.0, 1.0]).unwrap();
        let factors = build_factors(&KernelSpec::Linear, &data, &sample, &counter).unwrap();
        let approx = factors.dense_approximation();
        let expect = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
        for (a, b) in approx.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn matvec_agrees_with_dense_multiply() {
        let data = gaussian_cloud(30, 4, 11);
        let spec = KernelSpec::gaussian(1.2).unwrap();
        let counter = EvalCounter::new();
        let factors = build_factors(&spec, &data, &full_sample(30), &counter).unwrap();
        let k = DenseKernel::from_dataset(&spec, &data).unwrap();
        let v = Array1::from_shape_fn(30, |i| (i as f64 * 0.37).sin());
        let via_factors = factors.matvec(&v).unwrap();
        let via_dense = k.matrix().dot(&v);
        let scale = via_dense.dot(&via_dense).sqrt();
        let diff = (&via_factors - &via_dense).mapv(f64::abs).sum();
        assert!(diff <= 1e-8 * scale.max(1.0));

        let zero = factors.matvec(&Array1::zeros(30)).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
        assert!(factors.matvec(&Array1::zeros(29)).is_err());
    }

    #[test]
    fn approx_is_symmetric_on_basis_vectors() {
        let data = gaussian_cloud(20, 3, 5);
        let spec = KernelSpec::gaussian(0.9).unwrap();
        let counter = EvalCounter::new();
        let sample = LandmarkSample::new(vec![1, 7, 13], vec![1.0; 3]).unwrap();
        let factors = build_factors(&spec, &data, &sample, &counter).unwrap();
        let mut e3 = Array1::zeros(20);
        e3[3] = 1.0;
        let mut e9 = Array1::zeros(20);
        e9[9] = 1.0;
        let col = factors.matvec(&e3).unwrap();
        let row = factors.matvec(&e9).unwrap();
        assert!((col[9] - row[3]).abs() < 1e-10);
    }

    #[test]
    fn feature_map_factorizes_the_approximation() {
        let data = gaussian_cloud(24, 3, 19);
        let spec = KernelSpec::gaussian(1.0).unwrap();
        let counter = EvalCounter::new();
        let sample = LandmarkSample::new(vec![0, 5, 10, 15], vec![1.0; 4]).unwrap();
        let factors = build_factors(&spec, &data, &sample, &counter).unwrap();
        let f = factors.feature_map().unwrap();
        assert_eq!(f.dim(), (24, 4));
        let gram = f.dot(&f.t());
        let dense = factors.dense_approximation();
        let scale = dense.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        for (a, b) in gram.iter().zip(dense.iter()) {
            assert!((a - b).abs() <= 1e-8 * scale.max(1.0));
        }
    }

    #[test]
    fn feature_map_of_duplicate_points_has_truncated_rank() {
        // Two identical landmarks: S^T K S is rank deficient.
        let features = array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let data = Dataset::new(features, None).unwrap();
        let counter = EvalCounter::new();
        let sample = LandmarkSample::new(vec![0, 1], vec![1.0, 1.0]).unwrap();
        let factors = build_factors(&KernelSpec::Linear, &data, &sample, &counter).unwrap();
        assert_eq!(factors.rank(), 1);
        let f = factors.feature_map().unwrap();
        let gram = f.t().dot(&f);
        let eigvals = linalg::sym_eigvals(&gram.view()).unwrap();
        let nonzero = eigvals.iter().filter(|v| **v > 1e-9).count();
        assert!(nonzero <= 1);
    }

    #[test]
    fn estimator_matches_oracle_on_small_instance() {
        let data = gaussian_cloud(500, 4, 23);
        let spec = KernelSpec::gaussian(0.7).unwrap();
        let counter = EvalCounter::new();
        let sample = LandmarkSample::new((0..50).collect(), vec![1.0; 50]).unwrap();
        let factors = build_factors(&spec, &data, &sample, &counter).unwrap();
        let k = DenseKernel::from_dataset(&spec, &data).unwrap();
        let exact = exact_spectral_error(&k, &factors).unwrap();
        for seed in 0..10u64 {
            let est = estimate_spectral_error(&spec, &data, &factors, 500, 200, seed).unwrap();
            assert!(
                (est - exact).abs() <= 0.01 * exact.max(1e-12),
                "seed {seed}: est {est} vs exact {exact}"
            );
        }
    }

    #[test]
    fn rebuilding_factors_is_bit_stable() {
        let data = gaussian_cloud(50, 3, 31);
        let spec = KernelSpec::gaussian(0.8).unwrap();
        let sample = LandmarkSample::new(vec![1, 9, 17, 33], vec![1.0; 4]).unwrap();
        let a = build_factors(&spec, &data, &sample, &EvalCounter::new()).unwrap();
        let b = build_factors(&spec, &data, &sample, &EvalCounter::new()).unwrap();
        assert_eq!(a.columns(), b.columns());
        assert_eq!(a.winv(), b.winv());
        assert_eq!(a.rank(), b.rank());
    }

    #[test]
    fn estimator_near_zero_for_exact_approximation() {
        let data = gaussian_cloud(60, 3, 2);
        let spec = KernelSpec::gaussian(1.0).unwrap();
        let counter = EvalCounter::new();
        let factors = build_factors(&spec, &data, &full_sample(60), &counter).unwrap();
        let est = estimate_spectral_error(&spec, &data, &factors, 60, 100, 1).unwrap();
        let k = DenseKernel::from_dataset(&spec, &data).unwrap();
        let trace: f64 = k.matrix().diag().sum();
        assert!(est <= 1e-6 * trace);
    }

    #[test]
    fn rank_one_kernel_exactly_captured_by_one_landmark() {
        // All points identical under a linear kernel: K is rank one.
        let features = Array2::from_shape_fn((30, 2), |_| 1.5);
        let data = Dataset::new(features, None).unwrap();
        let counter = EvalCounter::new();
        let sample = LandmarkSample::new(vec![0], vec![1.0]).unwrap();
        let factors = build_factors(&KernelSpec::Linear, &data, &sample, &counter).unwrap();
        let est =
            estimate_spectral_error(&KernelSpec::Linear, &data, &factors, 30, 100, 9).unwrap();
        assert!(est <= 1e-8);
    }

    #[test]
    fn estimator_rejects_bad_subset() {
        let data = gaussian_cloud(10, 2, 1);
        let spec = KernelSpec::gaussian(1.0).unwrap();
        let counter = EvalCounter::new();
        let factors = build_factors(&spec, &data, &full_sample(10), &counter).unwrap();
        assert!(estimate_spectral_error(&spec, &data, &factors, 0, 10, 0).is_err());
        assert!(estimate_spectral_error(&spec, &data, &factors, 11, 10, 0).is_err());
    }

    #[test]
    fn factors_round_trip_through_container() {
        let data = gaussian_cloud(15, 2, 4);
        let spec = KernelSpec::gaussian(0.6).unwrap();
        let counter = EvalCounter::new();
        let sample = LandmarkSample::new(vec![2, 8, 11], vec![1.0; 3]).unwrap();
        let factors = build_factors(&spec, &data, &sample, &counter).unwrap();
        let mut buf = Vec::new();
        factors.write_to(&mut buf).unwrap();
        let back = NystromFactors::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.landmark_indices(), factors.landmark_indices());
        assert_eq!(back.rank(), factors.rank());
        assert_eq!(back.columns(), factors.columns());
        assert_eq!(back.winv(), factors.winv());
        assert_eq!(back.kernel(), factors.kernel());
    }
}
