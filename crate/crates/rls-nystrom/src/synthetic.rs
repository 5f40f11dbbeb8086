//! Seeded generators for the test distributions the property suites rely
//! on: clustered Gaussian point clouds with one dominant cluster, and
//! kernel matrices with a prescribed spectrum.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::oracle::DenseKernel;
use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Cluster layout: sizes, centers, and a per-cluster spread.
#[derive(Debug, Clone)]
pub struct ClusterSpec {
    pub cluster_sizes: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub spreads: Vec<f64>,
}

impl ClusterSpec {
    pub fn new(
        cluster_sizes: Vec<usize>,
        centers: Vec<Vec<f64>>,
        spreads: Vec<f64>,
    ) -> Result<Self> {
        if cluster_sizes.is_empty() || cluster_sizes.len() != centers.len() {
            return Err(Error::invalid_argument(
                "cluster sizes and centers must align",
            ));
        }
        if spreads.len() != cluster_sizes.len() {
            return Err(Error::invalid_argument("one spread per cluster required"));
        }
        if spreads.iter().any(|&s| s < 0.0) {
            return Err(Error::invalid_argument("spreads must be nonnegative"));
        }
        let d = centers[0].len();
        if centers.iter().any(|c| c.len() != d) {
            return Err(Error::invalid_argument("centers must share a dimension"));
        }
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                if centers[i] == centers[j] {
                    return Err(Error::invalid_argument("cluster centers must be distinct"));
                }
            }
        }
        Ok(ClusterSpec {
            cluster_sizes,
            centers,
            spreads,
        })
    }

    pub fn n(&self) -> usize {
        self.cluster_sizes.iter().sum()
    }

    pub fn d(&self) -> usize {
        self.centers[0].len()
    }

    /// One dominant cluster holding `dominant_fraction` of the points plus
    /// `small_clusters` equally sized ones, centers `separation` apart along
    /// coordinate axes. The layout behind the qualitative sampling
    /// comparisons: uniform landmarks flood the big cluster and miss the
    /// small ones.
    pub fn dominant_plus_satellites(
        n: usize,
        dominant_fraction: f64,
        small_clusters: usize,
        separation: f64,
        spread: f64,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&dominant_fraction) || dominant_fraction <= 0.0 {
            return Err(Error::invalid_argument(
                "dominant_fraction must lie in (0, 1)",
            ));
        }
        if small_clusters == 0 || n < small_clusters + 1 {
            return Err(Error::invalid_argument(
                "need at least one point per cluster",
            ));
        }
        let dominant = ((n as f64) * dominant_fraction).round() as usize;
        let rest = n - dominant;
        let base = rest / small_clusters;
        if base == 0 {
            return Err(Error::invalid_argument("too many small clusters for n"));
        }
        let mut sizes = vec![dominant];
        let mut leftover = rest - base * small_clusters;
        for _ in 0..small_clusters {
            let extra = if leftover > 0 { 1 } else { 0 };
            leftover = leftover.saturating_sub(1);
            sizes.push(base + extra);
        }
        let d = small_clusters + 1;
        let mut centers = vec![vec![0.0; d]];
        for c in 0..small_clusters {
            let mut center = vec![0.0; d];
            center[c + 1] = separation;
            centers.push(center);
        }
        let spreads = vec![spread; small_clusters + 1];
        ClusterSpec::new(sizes, centers, spreads)
    }
}

/// Draw points around the cluster centers: `center + spread * N(0, I)`.
pub fn clustered_gaussian(spec: &ClusterSpec, seed: u64) -> Dataset {
    let n = spec.n();
    let d = spec.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Array2::zeros((n, d));
    let mut row = 0;
    for (c, &size) in spec.cluster_sizes.iter().enumerate() {
        for _ in 0..size {
            for j in 0..d {
                let noise: f64 = rng.sample(StandardNormal);
                features[[row, j]] = spec.centers[c][j] + spec.spreads[c] * noise;
            }
            row += 1;
        }
    }
    Dataset::new(features, None).expect("generator produces finite points")
}

/// Cluster label for every generated row, in generation order.
pub fn cluster_labels(spec: &ClusterSpec) -> Vec<usize> {
    let mut labels = Vec::with_capacity(spec.n());
    for (c, &size) in spec.cluster_sizes.iter().enumerate() {
        labels.extend(std::iter::repeat_n(c, size));
    }
    labels
}

/// Kernel matrix with exactly the given spectrum: `K = Q diag(e) Q^T` for a
/// seeded random orthogonal `Q` (QR of a Gaussian matrix with sign-fixed R
/// diagonal).
pub fn spectrum_kernel(eigenvalues: &[f64], seed: u64) -> Result<DenseKernel> {
    let n = eigenvalues.len();
    if n == 0 {
        return Err(Error::invalid_argument("spectrum must be nonempty"));
    }
    for w in eigenvalues.windows(2) {
        if w[1] > w[0] {
            return Err(Error::invalid_argument("eigenvalues must be nonincreasing"));
        }
    }
    if eigenvalues.iter().any(|&v| v < 0.0) {
        return Err(Error::invalid_argument("eigenvalues must be nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = Array2::from_shape_fn((n, n), |_| rng.sample::<f64, _>(StandardNormal));
    let q = linalg::orthonormal_columns(&gauss.view())?;
    let diag = Array1::from(eigenvalues.to_vec());
    let scaled = &q * &diag;
    let mut k = scaled.dot(&q.t());
    linalg::symmetrize(&mut k);
    DenseKernel::from_matrix(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;
    use crate::oracle;

    #[test]
    fn zero_spread_collapses_to_center() {
        let spec = ClusterSpec::new(vec![5], vec![vec![1.0, -2.0]], vec![0.0]).unwrap();
        let data = clustered_gaussian(&spec, 3);
        for row in data.features().rows() {
            assert_eq!(row[0], 1.0);
            assert_eq!(row[1], -2.0);
        }
    }

    #[test]
    fn same_seed_reproduces_dataset() {
        let spec = ClusterSpec::dominant_plus_satellites(200, 0.9, 4, 10.0, 0.5).unwrap();
        let a = clustered_gaussian(&spec, 42);
        let b = clustered_gaussian(&spec, 42);
        assert_eq!(a.features(), b.features());
        let c = clustered_gaussian(&spec, 43);
        assert_ne!(a.features(), c.features());
    }

    #[test]
    fn dominant_cluster_layout_has_low_effective_dimension() {
        let spec = ClusterSpec::dominant_plus_satellites(1000, 0.9, 10, 10.0, 0.3).unwrap();
        let data = clustered_gaussian(&spec, 7);
        let kernel = DenseKernel::from_dataset(&KernelSpec::gaussian(1.0).unwrap(), &data).unwrap();
        let lambda = oracle::lambda_for_k(&kernel, 20).unwrap();
        let deff = oracle::exact_deff(&kernel, lambda).unwrap();
        assert!(deff < 1000.0 / 10.0, "deff = {deff}");
    }

    #[test]
    fn spectrum_kernel_identity_case() {
        let k = spectrum_kernel(&[1.0; 6], 11).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((k.matrix()[[i, j]] - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spectrum_kernel_recovers_eigenvalues() {
        let eigs: Vec<f64> = (0..40).map(|i| 2f64.powi(-i / 4)).collect();
        let k = spectrum_kernel(&eigs, 5).unwrap();
        let recovered = k.eigenvalues().unwrap();
        for (a, b) in recovered.iter().zip(eigs.iter()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn spectrum_kernel_tail_average_example() {
        let k = spectrum_kernel(&[3.0, 1.0], 1).unwrap();
        let lambda = oracle::lambda_for_k(&k, 1).unwrap();
        assert!((lambda - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spectrum_kernel_geometric_decay_soft_threshold() {
        let n = 200;
        let eigs: Vec<f64> = (0..n).map(|i| 2f64.powi(-i)).collect();
        let k = spectrum_kernel(&eigs, 9).unwrap();
        let lambda = 2f64.powi(-10);
        let deff = oracle::exact_deff(&k, lambda).unwrap();
        let above = eigs.iter().filter(|&&v| v > lambda).count() as f64;
        assert!((deff - above).abs() <= 3.0, "deff {deff} vs count {above}");
    }

    #[test]
    fn spectrum_kernel_rejects_bad_input() {
        assert!(spectrum_kernel(&[1.0, 2.0], 0).is_err());
        assert!(spectrum_kernel(&[1.0, -0.1], 0).is_err());
    }

    #[test]
    fn small_cluster_points_carry_higher_mean_leverage() {
        let spec = ClusterSpec::dominant_plus_satellites(1000, 0.9, 10, 10.0, 0.3).unwrap();
        let data = clustered_gaussian(&spec, 123);
        let kernel = DenseKernel::from_dataset(&KernelSpec::gaussian(1.0).unwrap(), &data).unwrap();
        let lambda = oracle::lambda_for_k(&kernel, 20).unwrap();
        let scores = oracle::exact_ridge_scores(&kernel, lambda).unwrap();
        let labels = cluster_labels(&spec);
        let mut dominant = (0.0, 0usize);
        let mut satellite = (0.0, 0usize);
        for (i, &c) in labels.iter().enumerate() {
            if c == 0 {
                dominant = (dominant.0 + scores[i], dominant.1 + 1);
            } else {
                satellite = (satellite.0 + scores[i], satellite.1 + 1);
            }
        }
        let mean_dom = dominant.0 / dominant.1 as f64;
        let mean_sat = satellite.0 / satellite.1 as f64;
        assert!(
            mean_sat > mean_dom,
            "satellite mean {mean_sat} should exceed dominant mean {mean_dom}"
        );
    }
}
