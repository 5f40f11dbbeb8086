//! Property and Monte-Carlo invariants that cut across modules.

use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rls_nystrom::baselines::{rff_build, rff_transform};
use rls_nystrom::data::{load_libsvm_str, preprocess, save_libsvm, Dataset};
use rls_nystrom::kernel::{EvalCounter, KernelSpec};
use rls_nystrom::oracle::{exact_spectral_norm_diff, DenseKernel};
use std::collections::BTreeSet;

fn small_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..8, 1usize..6).prop_flat_map(|(n, d)| {
        proptest::collection::vec(
            proptest::collection::vec(prop_oneof![3 => -100.0..100.0f64, 1 => Just(0.0)], d),
            n,
        )
    })
}

proptest! {
    #[test]
    fn libsvm_round_trip_is_identity(rows in small_matrix(), label_seed in 0u64..1000) {
        let n = rows.len();
        let d = rows[0].len();
        let features = Array2::from_shape_fn((n, d), |(i, j)| rows[i][j]);
        let mut rng = ChaCha8Rng::seed_from_u64(label_seed);
        let labels = Array1::from_shape_fn(n, |_| if rng.gen::<bool>() { 1.0 } else { -1.0 });
        let data = Dataset::new(features, Some(labels)).unwrap();
        let text = save_libsvm(&data).unwrap();
        let back = load_libsvm_str(&text).unwrap();
        prop_assert_eq!(back.features(), data.features());
        prop_assert_eq!(back.labels().unwrap(), data.labels().unwrap());
    }

    #[test]
    fn preprocess_is_idempotent_and_standardizing(rows in small_matrix()) {
        let n = rows.len();
        let d = rows[0].len();
        let features = Array2::from_shape_fn((n, d), |(i, j)| rows[i][j]);
        let data = Dataset::new(features, None).unwrap();
        let (once, _) = preprocess(&data, &BTreeSet::new()).unwrap();
        for j in 0..once.d() {
            let col = once.features().column(j);
            let mean = col.sum() / n as f64;
            prop_assert!(mean.abs() <= 1e-10);
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            // Constant columns keep scale 1 and stay at zero variance.
            prop_assert!(var <= 1e-12 || (var - 1.0).abs() <= 1e-8);
        }
        let (twice, _) = preprocess(&once, &BTreeSet::new()).unwrap();
        for (a, b) in once.features().iter().zip(twice.features().iter()) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn kernel_config_string_round_trips(sigma in 0.01f64..100.0, degree in 1u32..6, offset in 0.0f64..10.0) {
        for spec in [
            KernelSpec::gaussian(sigma).unwrap(),
            KernelSpec::Linear,
            KernelSpec::polynomial(degree, offset).unwrap(),
        ] {
            let back: KernelSpec = spec.to_string().parse().unwrap();
            prop_assert_eq!(back, spec);
        }
    }

    #[test]
    fn kernel_column_counter_is_exact(n in 1usize..30, s in 0usize..10, seed in 0u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = Dataset::new(
            Array2::from_shape_fn((n, 3), |_| rng.gen::<f64>()),
            None,
        ).unwrap();
        let landmarks: Vec<usize> = (0..s.min(n)).collect();
        let counter = EvalCounter::new();
        let _ = rls_nystrom::kernel::kernel_columns(
            &KernelSpec::gaussian(1.0).unwrap(), &data, &landmarks, &counter,
        ).unwrap();
        prop_assert_eq!(counter.count(), (n * landmarks.len()) as u64);
        let before = counter.count();
        let _ = rls_nystrom::kernel::kernel_diagonal(
            &KernelSpec::gaussian(1.0).unwrap(), &data, &counter,
        );
        prop_assert_eq!(counter.count() - before, n as u64);
    }
}

#[test]
fn gram_matrices_are_psd_for_all_kernel_kinds() {
    // Monte-Carlo PSD check: constructing the dense oracle validates
    // symmetry and that the minimum eigenvalue clears -1e-8 * trace.
    for trial in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + trial);
        let n = 40 + (trial as usize % 3) * 30;
        let data = Dataset::new(
            Array2::from_shape_fn((n, 4), |_| rng.gen::<f64>() * 4.0 - 2.0),
            None,
        )
        .unwrap();
        for spec in [
            KernelSpec::gaussian(0.5 + 0.2 * trial as f64).unwrap(),
            KernelSpec::Linear,
            KernelSpec::polynomial(2, 1.0).unwrap(),
        ] {
            let kernel = DenseKernel::from_dataset(&spec, &data).unwrap();
            let eigs = kernel.eigenvalues().unwrap();
            assert!(eigs[n - 1] >= 0.0, "clamped eigenvalues are nonnegative");
            if let KernelSpec::Gaussian { .. } = spec {
                assert!(kernel.matrix().iter().all(|&v| v > 0.0 && v <= 1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn rff_error_decreases_as_features_double() {
    let n = 500;
    let sigma = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let data = Dataset::new(
        Array2::from_shape_fn((n, 4), |_| rng.gen::<f64>() * 2.0 - 1.0),
        None,
    )
    .unwrap();
    let spec = KernelSpec::gaussian(sigma).unwrap();
    let kernel = DenseKernel::from_dataset(&spec, &data).unwrap();
    let mut medians = Vec::new();
    for d_features in [32usize, 64, 128, 256] {
        let mut errors: Vec<f64> = (0..9u64)
            .map(|seed| {
                let map = rff_build(4, d_features, sigma, 1000 + seed).unwrap();
                let z = rff_transform(&map, &data).unwrap();
                let approx = z.dot(&z.t());
                exact_spectral_norm_diff(&kernel, &approx).unwrap()
            })
            .collect();
        errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push(errors[4]);
    }
    for w in medians.windows(2) {
        assert!(
            w[1] < w[0],
            "median rff error must decrease as features double: {medians:?}"
        );
    }
}

#[test]
fn uniform_nystrom_never_exceeds_the_kernel() {
    // The projection argument holds for any landmark set, including
    // uniformly drawn ones.
    use rls_nystrom::baselines::uniform_sample;
    use rls_nystrom::nystrom::build_factors;
    use rls_nystrom::oracle::error_spectrum_bounds;
    for trial in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + trial);
        let data = Dataset::new(
            Array2::from_shape_fn((120, 3), |_| rng.gen::<f64>() * 2.0 - 1.0),
            None,
        )
        .unwrap();
        let spec = KernelSpec::gaussian(0.8).unwrap();
        let kernel = DenseKernel::from_dataset(&spec, &data).unwrap();
        let sample = uniform_sample(120, 25, trial).unwrap();
        let counter = EvalCounter::new();
        let factors = build_factors(&spec, &data, &sample, &counter).unwrap();
        let (_, min_e) = error_spectrum_bounds(&kernel, &factors).unwrap();
        let norm = kernel.eigenvalues().unwrap()[0];
        assert!(
            min_e >= -1e-8 * norm,
            "trial {trial}: min eigenvalue {min_e}"
        );
    }
}
