//! Approximate kernel ridge regression end to end: sample landmarks, fit
//! on the factored approximation, and predict held-out points with s
//! kernel evaluations each.
//!
//! Run with: cargo run --release --example ridge_regression

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rls_nystrom::data::Dataset;
use rls_nystrom::downstream::{krr_fit, krr_predict};
use rls_nystrom::kernel::{EvalCounter, KernelSpec};
use rls_nystrom::nystrom::build_factors;
use rls_nystrom::sampler::{recursive_rls_fixed_size, SamplerConfig};

fn target(x: &[f64]) -> f64 {
    (2.0 * x[0]).sin() + 0.5 * (3.0 * x[1]).cos() + 0.25 * x[0] * x[1]
}

fn main() -> rls_nystrom::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n_train = 2000;
    let n_test = 400;
    let noise = 0.05;
    let draw = |rng: &mut ChaCha8Rng, n: usize| -> (Dataset, Array1<f64>) {
        let mut rows = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let x = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            ys.push(target(&x) + noise * (rng.gen::<f64>() - 0.5));
            rows.push(x);
        }
        let features = ndarray::Array2::from_shape_fn((n, 2), |(i, j)| rows[i][j]);
        (Dataset::new(features, None).unwrap(), Array1::from(ys))
    };
    let (train, y_train) = draw(&mut rng, n_train);
    let (test, y_test) = draw(&mut rng, n_test);

    let spec = KernelSpec::gaussian(0.7)?;
    let lambda = 1e-3;
    let counter = EvalCounter::new();
    let sample =
        recursive_rls_fixed_size(&spec, &train, 150, &SamplerConfig::practical(3), &counter)?;
    let factors = build_factors(&spec, &train, &sample, &counter)?;
    let model = krr_fit(&factors, &y_train, lambda)?;
    println!(
        "fitted on {n_train} points with {} landmarks ({} kernel evaluations)",
        sample.len(),
        counter.count()
    );

    let before = counter.count();
    let mut sq = 0.0;
    for i in 0..n_test {
        let pred = krr_predict(&model, &train, test.features().row(i), &counter)?;
        sq += (pred - y_test[i]) * (pred - y_test[i]);
    }
    let rmse = (sq / n_test as f64).sqrt();
    println!(
        "test rmse {rmse:.4} over {n_test} points ({} kernel evaluations per prediction)",
        (counter.count() - before) / n_test as u64
    );
    Ok(())
}
