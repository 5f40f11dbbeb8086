//! Run linear algorithms on the Nystrom feature map: the n x s embedding
//! whose Gram matrix equals the approximate kernel, so kernel k-means and
//! kernel PCA reduce to their ordinary linear versions.
//!
//! Run with: cargo run --release --example clustering_and_pca

use rls_nystrom::downstream::{kmeans_on_features, kpca_on_features};
use rls_nystrom::kernel::{EvalCounter, KernelSpec};
use rls_nystrom::nystrom::build_factors;
use rls_nystrom::sampler::{recursive_rls_fixed_size, SamplerConfig};
use rls_nystrom::synthetic::{cluster_labels, clustered_gaussian, ClusterSpec};

fn main() -> rls_nystrom::Result<()> {
    // Five well-separated clusters of equal size.
    let layout = ClusterSpec::new(
        vec![400; 5],
        (0..5)
            .map(|c| {
                let mut center = vec![0.0; 5];
                center[c] = 8.0;
                center
            })
            .collect(),
        vec![0.5; 5],
    )?;
    let data = clustered_gaussian(&layout, 21);
    let truth = cluster_labels(&layout);
    let spec = KernelSpec::gaussian(1.5)?;

    let counter = EvalCounter::new();
    let sample =
        recursive_rls_fixed_size(&spec, &data, 60, &SamplerConfig::practical(9), &counter)?;
    let factors = build_factors(&spec, &data, &sample, &counter)?;
    let features = factors.feature_map()?;
    println!(
        "feature map: {} x {} (rank {})",
        features.nrows(),
        features.ncols(),
        factors.rank()
    );

    let (labels, objective) = kmeans_on_features(&features, 5, 3, 100, 13)?;
    // Clustering accuracy via majority vote per found cluster.
    let mut majority = [[0usize; 5]; 5];
    for (i, &l) in labels.iter().enumerate() {
        majority[l][truth[i]] += 1;
    }
    let agree: usize = majority.iter().map(|row| row.iter().max().unwrap()).sum();
    println!(
        "kernel k-means: objective {objective:.2}, majority agreement {}/{}",
        agree,
        data.n()
    );

    let (components, captured) = kpca_on_features(&features, 4)?;
    let embedded = features.dot(&components);
    println!(
        "kernel PCA: captured energy {captured:.2}, embedding {} x {}",
        embedded.nrows(),
        embedded.ncols()
    );
    // Cluster centers in the embedded space stay well separated.
    let mut centers = [[0.0f64; 4]; 5];
    for (i, &t) in truth.iter().enumerate() {
        for j in 0..4 {
            centers[t][j] += embedded[[i, j]] / 400.0;
        }
    }
    let mut min_gap = f64::INFINITY;
    for a in 0..5 {
        for b in (a + 1)..5 {
            let gap: f64 = (0..4)
                .map(|j| (centers[a][j] - centers[b][j]).powi(2))
                .sum::<f64>()
                .sqrt();
            min_gap = min_gap.min(gap);
        }
    }
    println!("minimum center separation after embedding: {min_gap:.3}");
    Ok(())
}
