//! Load small CSV and libsvm datasets, expand a categorical column, and
//! standardize features the way the benchmark protocol expects.
//!
//! Run with: cargo run --example datasets

use rls_nystrom::data::{load_csv_str, load_libsvm_str, preprocess, save_libsvm, DATASET_REGISTRY};
use std::collections::BTreeSet;

fn main() -> rls_nystrom::Result<()> {
    let csv = "height,weight,group,label\n1.72,68,0,1\n1.61,59,1,-1\n1.80,82,0,1\n1.67,63,2,-1\n";
    let data = load_csv_str(csv, Some(3))?;
    println!(
        "csv: {} points, {} features, labels {:?}",
        data.n(),
        data.d(),
        data.labels().unwrap().to_vec()
    );

    // Column 2 is a categorical group code; expand it into indicators, then
    // center and scale everything to unit variance.
    let categorical: BTreeSet<usize> = [2].into_iter().collect();
    let (standardized, report) = preprocess(&data, &categorical)?;
    println!(
        "after preprocessing: {} features ({:?} expanded), means recorded for reuse",
        standardized.d(),
        report.expanded_categoricals
    );
    for (j, (m, s)) in report.mean.iter().zip(report.scale.iter()).enumerate() {
        println!("  column {j}: mean {m:.3}, scale {s:.3}");
    }

    let sparse = "1 1:0.5 3:2.0\n-1 2:1.0\n1 1:1.5 2:0.25\n";
    let svm = load_libsvm_str(sparse)?;
    println!(
        "\nlibsvm: {} points densified to {} features",
        svm.n(),
        svm.d()
    );
    let round_tripped = load_libsvm_str(&save_libsvm(&svm)?)?;
    println!(
        "round trip preserves the dense matrix: {}",
        round_tripped.features() == svm.features()
    );

    println!("\nbenchmark dataset registry (download out of scope):");
    for info in DATASET_REGISTRY {
        println!("  {:<18} n = {:>7}, d = {:>3}", info.name, info.n, info.d);
    }
    Ok(())
}
