//! Select landmarks by recursive ridge-leverage-score sampling and compare
//! where they land against uniform selection on clustered data.
//!
//! Run with: cargo run --example landmark_sampling

use rls_nystrom::baselines;
use rls_nystrom::kernel::{EvalCounter, KernelSpec};
use rls_nystrom::sampler::{recursive_rls_fixed_size_traced, SamplerConfig};
use rls_nystrom::synthetic::{cluster_labels, clustered_gaussian, ClusterSpec};

fn main() -> rls_nystrom::Result<()> {
    // 90% of the points sit in one big cluster; ten small clusters hold the
    // rest. Uniform sampling floods the big cluster and misses satellites.
    let layout = ClusterSpec::dominant_plus_satellites(4000, 0.9, 10, 10.0, 0.1)?;
    let data = clustered_gaussian(&layout, 7);
    let labels = cluster_labels(&layout);
    let spec = KernelSpec::gaussian(1.0)?;

    let s = 100;
    let config = SamplerConfig::practical(42);
    let counter = EvalCounter::new();
    let (sample, trace) = recursive_rls_fixed_size_traced(&spec, &data, s, &config, &counter)?;

    println!("requested {s} landmarks, selected {}", sample.len());
    println!(
        "kernel evaluations: {} ({} per point)",
        counter.count(),
        counter.count() / 4000
    );
    println!("recursion depth: {}", trace.depth());
    for level in &trace.levels {
        println!(
            "  level {}: {} points, scored from {} landmarks, {} evals{}",
            level.depth,
            level.m,
            level.scoring_sample_size,
            level.kernel_evals,
            if level.base_case { " (base case)" } else { "" }
        );
    }

    let coverage = |indices: &[usize]| -> (usize, usize) {
        let mut hit = vec![false; layout.cluster_sizes.len()];
        let mut dominant = 0;
        for &i in indices {
            hit[labels[i]] = true;
            if labels[i] == 0 {
                dominant += 1;
            }
        }
        (hit.iter().skip(1).filter(|&&h| h).count(), dominant)
    };

    let (rls_covered, rls_dominant) = coverage(sample.indices());
    let uniform = baselines::uniform_sample(data.n(), sample.len(), 42)?;
    let (uni_covered, uni_dominant) = coverage(uniform.indices());

    println!("\nsatellite clusters covered (of 10):");
    println!("  leverage-score sampling: {rls_covered} ({rls_dominant} landmarks in the dominant cluster)");
    println!("  uniform sampling:        {uni_covered} ({uni_dominant} landmarks in the dominant cluster)");
    Ok(())
}
