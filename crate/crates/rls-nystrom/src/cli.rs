//! Benchmark and utility command-line surface.
//!
//! Subcommands: `sample`, `approx`, `bench`, `regress`, `synth`, `verify`.
//! Machine-readable output goes to standard output as JSON (one line per
//! record for `bench`); progress notes go to standard error. Exit codes:
//! 0 success, 2 usage error, 3 numerical error, 4 verification failure.

use crate::acceptance;
use crate::baselines;
use crate::data::{self, Dataset};
use crate::downstream;
use crate::error::{Error, Result};
use crate::kernel::{EvalCounter, KernelSpec};
use crate::nystrom;
use crate::sampler::{self, mix_seed, LandmarkSample, SamplerConfig, SamplingMode};
use crate::synthetic;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "rlsn",
    about = "Kernel Nystrom approximation via recursive ridge-leverage-score sampling",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select landmarks by recursive ridge-leverage-score sampling.
    Sample(SampleArgs),
    /// Build Nystrom factors and write them to a binary container.
    Approx(ApproxArgs),
    /// Compare approximation methods across a sample-size grid.
    Bench(BenchArgs),
    /// Approximate kernel ridge regression on a train/test split.
    Regress(RegressArgs),
    /// Generate a clustered synthetic dataset as CSV.
    Synth(SynthArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Input dataset path.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Input format; `auto` picks libsvm for .libsvm/.svm, csv otherwise.
    #[arg(long, value_enum, default_value_t = DataFormat::Auto)]
    format: DataFormat,
    /// Column to extract as labels (CSV only).
    #[arg(long)]
    label_column: Option<usize>,
    /// Standardize features (indicator expansion is not applied here).
    #[arg(long)]
    standardize: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Auto,
    Csv,
    Libsvm,
}

fn load_dataset(args: &DataArgs) -> Result<Dataset> {
    let path = args
        .data
        .as_ref()
        .ok_or_else(|| Error::invalid_argument("--data is required"))?;
    let format = match args.format {
        DataFormat::Auto => {
            let ext = path
                .extension()
                .and_then(|e| e.to_str())
                .unwrap_or("")
                .to_ascii_lowercase();
            if ext == "libsvm" || ext == "svm" {
                DataFormat::Libsvm
            } else {
                DataFormat::Csv
            }
        }
        other => other,
    };
    let ds = match format {
        DataFormat::Libsvm => data::load_libsvm(path)?,
        _ => data::load_csv(path, args.label_column)?,
    };
    if args.standardize {
        let (out, _) = data::preprocess(&ds, &Default::default())?;
        Ok(out)
    } else {
        Ok(ds)
    }
}

#[derive(Args, Clone)]
struct SamplerArgs {
    /// Kernel config string, e.g. `gaussian:sigma=1.5`, `linear`,
    /// `poly:degree=3,offset=1`.
    #[arg(long)]
    kernel: String,
    /// Ridge parameter (fixed-lambda sampling). Conflicts with --size.
    #[arg(long, conflicts_with = "size")]
    lambda: Option<f64>,
    /// Target sample size (fixed-size sampling). Conflicts with --lambda.
    #[arg(long)]
    size: Option<usize>,
    /// Failure probability.
    #[arg(long, default_value_t = sampler::DEFAULT_DELTA)]
    delta: f64,
    /// Sampling regime: theoretical constants or practical multipliers.
    #[arg(long, value_enum, default_value_t = ModeArg::Practical)]
    mode: ModeArg,
    /// Practical-mode oversampling multiplier.
    #[arg(long, default_value_t = sampler::DEFAULT_OVERSAMPLING)]
    oversampling: f64,
    /// Cap intermediate recursion sample sizes (accelerated variant).
    #[arg(long)]
    accelerated: bool,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Full sampler configuration as a flat key=value block, e.g.
    /// `mode=practical,delta=0.01,oversampling=2.5,accelerated=false,\
    /// base_case=auto,c=auto,seed=7`. Overrides the individual sampler
    /// flags above.
    #[arg(long)]
    sampler_config: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Theory,
    Practical,
}

impl SamplerArgs {
    fn kernel_spec(&self) -> Result<KernelSpec> {
        self.kernel.parse()
    }

    fn config(&self, fixed_size: bool) -> Result<SamplerConfig> {
        if let Some(block) = &self.sampler_config {
            return SamplerConfig::from_config_string(block);
        }
        let mode = match (self.mode, fixed_size) {
            (ModeArg::Practical, _) => SamplingMode::Practical,
            (ModeArg::Theory, false) => SamplingMode::TheoryFixedLambda,
            (ModeArg::Theory, true) => SamplingMode::TheoryFixedSize,
        };
        Ok(SamplerConfig {
            delta: self.delta,
            oversampling_multiplier: self.oversampling,
            mode,
            accelerated: self.accelerated,
            base_case_threshold: None,
            fixed_size_constant: None,
            seed: self.seed,
        })
    }

    fn draw(
        &self,
        spec: &KernelSpec,
        dataset: &Dataset,
        counter: &EvalCounter,
    ) -> Result<(LandmarkSample, sampler::SampleTrace)> {
        match (self.lambda, self.size) {
            (Some(lambda), None) => sampler::recursive_rls_fixed_lambda_traced(
                spec,
                dataset,
                lambda,
                &self.config(false)?,
                counter,
            ),
            (None, Some(size)) => sampler::recursive_rls_fixed_size_traced(
                spec,
                dataset,
                size,
                &self.config(true)?,
                counter,
            ),
            _ => Err(Error::invalid_argument(
                "exactly one of --lambda or --size is required",
            )),
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Write the sample CSV here (`index,probability,weight`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SampleSummary {
    s: usize,
    sum_probabilities: f64,
    kernel_evals: u64,
    recursion_depth: usize,
    seed: u64,
}

fn cmd_sample(args: &SampleArgs) -> Result<()> {
    let dataset = load_dataset(&args.data)?;
    let spec = args.sampler.kernel_spec()?;
    let effective_seed = args.sampler.config(args.sampler.size.is_some())?.seed;
    let counter = EvalCounter::new();
    let (sample, trace) = args.sampler.draw(&spec, &dataset, &counter)?;
    if let Some(out) = &args.out {
        std::fs::write(out, sample.to_csv())?;
    }
    let summary = SampleSummary {
        s: sample.len(),
        sum_probabilities: trace.levels.first().map_or(0.0, |l| l.probability_sum),
        kernel_evals: counter.count(),
        recursion_depth: trace.depth(),
        seed: effective_seed,
    };
    println!("{}", serde_json::to_string(&summary).expect("serializable"));
    Ok(())
}

#[derive(Args)]
struct ApproxArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Reuse a previously written sample CSV instead of sampling.
    #[arg(long)]
    sample: Option<PathBuf>,
    /// Approximation kind; `rff` writes a random-features map container
    /// instead of Nystrom factors.
    #[arg(long, value_enum, default_value_t = BenchMethod::Rls)]
    method: BenchMethod,
    /// Output path for the binary model container.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct ApproxSummary {
    kind: &'static str,
    n: usize,
    s: usize,
    rank: usize,
    kernel_evals: u64,
    out: String,
}

fn cmd_approx(args: &ApproxArgs) -> Result<()> {
    let dataset = load_dataset(&args.data)?;
    let spec = args.sampler.kernel_spec()?;
    let counter = EvalCounter::new();
    let file = std::fs::File::create(&args.out)?;
    let mut writer = std::io::BufWriter::new(file);
    let summary = match args.method {
        BenchMethod::Rff => {
            let sigma = gaussian_sigma(&spec)?;
            let d_features = args
                .sampler
                .size
                .ok_or_else(|| Error::invalid_argument("--size sets the rff feature count"))?;
            let map = baselines::rff_build(dataset.d(), d_features, sigma, args.sampler.seed)?;
            map.write_to(&mut writer)?;
            ApproxSummary {
                kind: "rff",
                n: dataset.n(),
                s: map.feature_count(),
                rank: map.feature_count(),
                kernel_evals: counter.count(),
                out: args.out.display().to_string(),
            }
        }
        method => {
            let sample = match &args.sample {
                Some(path) => LandmarkSample::from_csv(&std::fs::read_to_string(path)?)?,
                None => match method {
                    BenchMethod::Uniform => {
                        let s = args.sampler.size.ok_or_else(|| {
                            Error::invalid_argument("--size is required for uniform")
                        })?;
                        baselines::uniform_sample(
                            dataset.n(),
                            s.min(dataset.n()),
                            args.sampler.seed,
                        )?
                    }
                    _ => {
                        let mut a = args.sampler.clone();
                        a.accelerated = a.accelerated || method == BenchMethod::RlsAccelerated;
                        a.draw(&spec, &dataset, &counter)?.0
                    }
                },
            };
            let factors = nystrom::build_factors(&spec, &dataset, &sample, &counter)?;
            factors.write_to(&mut writer)?;
            ApproxSummary {
                kind: "nystrom",
                n: factors.n(),
                s: factors.s(),
                rank: factors.rank(),
                kernel_evals: counter.count(),
                out: args.out.display().to_string(),
            }
        }
    };
    println!("{}", serde_json::to_string(&summary).expect("serializable"));
    Ok(())
}

fn gaussian_sigma(spec: &KernelSpec) -> Result<f64> {
    match spec {
        KernelSpec::Gaussian { sigma } => Ok(*sigma),
        _ => Err(Error::invalid_argument(
            "random Fourier features require a gaussian kernel",
        )),
    }
}

/// Approximation methods compared by `bench`.
#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum BenchMethod {
    Rls,
    #[value(alias = "rls_accelerated")]
    RlsAccelerated,
    Uniform,
    Rff,
}

impl std::fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl BenchMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BenchMethod::Rls => "rls",
            BenchMethod::RlsAccelerated => "rls_accelerated",
            BenchMethod::Uniform => "uniform",
            BenchMethod::Rff => "rff",
        }
    }
}

/// One benchmark measurement. `s` is the achieved sample count (the feature
/// count for rff); `kernel_evals` covers construction only, not the error
/// estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchResult {
    pub method: String,
    pub requested: usize,
    pub s: usize,
    pub spectral_error: f64,
    pub wall_time_seconds: f64,
    pub kernel_evals: u64,
    pub seed: u64,
}

/// Measurement knobs shared across a bench grid.
#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    /// Error-estimation subset bound (clamped to n).
    pub subset: usize,
    /// Power-iteration cap for the error estimate.
    pub iterations: usize,
    pub delta: f64,
    pub oversampling: f64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            subset: 20_000,
            iterations: 100,
            delta: sampler::DEFAULT_DELTA,
            oversampling: sampler::DEFAULT_OVERSAMPLING,
        }
    }
}

/// Build one approximation, time it, and estimate its spectral error on a
/// seeded subset. Statistical fields are bit-deterministic in `seed`; only
/// `wall_time_seconds` varies between runs.
pub fn bench_single(
    spec: &KernelSpec,
    dataset: &Dataset,
    method: BenchMethod,
    requested: usize,
    options: &BenchOptions,
    seed: u64,
) -> Result<BenchResult> {
    let n = dataset.n();
    let subset = options.subset.min(n);
    let estimator_iterations = options.iterations;
    let delta = options.delta;
    let oversampling = options.oversampling;
    let counter = EvalCounter::new();
    let estimator_seed = mix_seed(seed, 0x4553_5449); // "ESTI"

    // Construction is timed; the error estimate afterwards is measurement
    // and excluded from the wall time for every method.
    enum Built {
        Factors(nystrom::NystromFactors, usize),
        GramFactor(ndarray::Array2<f64>, usize),
    }
    let start = Instant::now();
    let built = match method {
        BenchMethod::Rls | BenchMethod::RlsAccelerated => {
            let mut config = SamplerConfig::practical(seed);
            config.delta = delta;
            config.oversampling_multiplier = oversampling;
            config.accelerated = method == BenchMethod::RlsAccelerated;
            let sample =
                sampler::recursive_rls_fixed_size(spec, dataset, requested, &config, &counter)?;
            let s = sample.len();
            Built::Factors(nystrom::build_factors(spec, dataset, &sample, &counter)?, s)
        }
        BenchMethod::Uniform => {
            let sample = baselines::uniform_sample(n, requested.min(n), seed)?;
            let s = sample.len();
            Built::Factors(nystrom::build_factors(spec, dataset, &sample, &counter)?, s)
        }
        BenchMethod::Rff => {
            let sigma = gaussian_sigma(spec)?;
            let map = baselines::rff_build(dataset.d(), requested, sigma, seed)?;
            Built::GramFactor(baselines::rff_transform(&map, dataset)?, requested)
        }
    };
    let wall_time_seconds = start.elapsed().as_secs_f64();
    let (s, spectral_error) = match &built {
        Built::Factors(factors, s) => (
            *s,
            nystrom::estimate_spectral_error(
                spec,
                dataset,
                factors,
                subset,
                estimator_iterations,
                estimator_seed,
            )?,
        ),
        Built::GramFactor(z, s) => (
            *s,
            nystrom::estimate_spectral_error_gram_factor(
                spec,
                dataset,
                z,
                subset,
                estimator_iterations,
                estimator_seed,
            )?,
        ),
    };
    Ok(BenchResult {
        method: method.name().to_string(),
        requested,
        s,
        spectral_error,
        wall_time_seconds,
        kernel_evals: counter.count(),
        seed,
    })
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Kernel config string.
    #[arg(long)]
    kernel: String,
    /// Methods to compare.
    #[arg(long, value_delimiter = ',', default_values_t = vec![BenchMethod::Rls, BenchMethod::Uniform])]
    methods: Vec<BenchMethod>,
    /// Sample-size grid.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Trials per (method, size) cell.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Error-estimation subset bound.
    #[arg(long, default_value_t = 20_000)]
    subset: usize,
    /// Power-iteration cap for the error estimate.
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    #[arg(long, default_value_t = sampler::DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = sampler::DEFAULT_OVERSAMPLING)]
    oversampling: f64,
    /// Base seed; trial seeds derive deterministically from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the results as a CSV table here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the known benchmark dataset shapes and exit.
    #[arg(long)]
    list_datasets: bool,
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    if args.list_datasets {
        for info in data::DATASET_REGISTRY {
            println!(
                "{}",
                serde_json::json!({"name": info.name, "n": info.n, "d": info.d})
            );
        }
        return Ok(());
    }
    let dataset = load_dataset(&args.data)?;
    let spec: KernelSpec = args.kernel.parse()?;
    if args.subset > dataset.n() {
        eprintln!(
            "note: subset {} clamped to n = {}",
            args.subset,
            dataset.n()
        );
    }
    let options = BenchOptions {
        subset: args.subset,
        iterations: args.iterations,
        delta: args.delta,
        oversampling: args.oversampling,
    };
    let mut results = Vec::new();
    for &method in &args.methods {
        for &size in &args.sizes {
            for trial in 0..args.trials {
                let seed = mix_seed(
                    args.seed,
                    (method as u64) << 40 | (size as u64) << 16 | trial as u64,
                );
                let r = bench_single(&spec, &dataset, method, size, &options, seed)?;
                println!("{}", serde_json::to_string(&r).expect("serializable"));
                results.push(r);
            }
        }
    }
    if let Some(out) = &args.out {
        write_bench_csv(out, &results)?;
    }
    Ok(())
}

fn write_bench_csv(path: &Path, results: &[BenchResult]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        f,
        "method,requested,s,spectral_error,wall_time_seconds,kernel_evals,seed"
    )?;
    for r in results {
        writeln!(
            f,
            "{},{},{},{},{},{},{}",
            r.method,
            r.requested,
            r.s,
            r.spectral_error,
            r.wall_time_seconds,
            r.kernel_evals,
            r.seed
        )?;
    }
    Ok(())
}

#[derive(Args)]
struct RegressArgs {
    /// Training dataset (must carry labels).
    #[arg(long)]
    train: PathBuf,
    /// Held-out dataset (must carry labels).
    #[arg(long)]
    test: PathBuf,
    #[arg(long, value_enum, default_value_t = DataFormat::Auto)]
    format: DataFormat,
    /// Label column (CSV inputs).
    #[arg(long)]
    label_column: Option<usize>,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Landmark selection for the approximation.
    #[arg(long, value_enum, default_value_t = BenchMethod::Rls)]
    method: BenchMethod,
    /// Ridge parameter of the regression itself.
    #[arg(long)]
    ridge: f64,
    /// Metric: squared-error regression or sign-threshold classification.
    #[arg(long, value_enum, default_value_t = TaskArg::Regression)]
    task: TaskArg,
    /// Write the fitted model (with its approximation) to this path.
    /// Landmark methods only.
    #[arg(long)]
    save_model: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    Regression,
    Classification,
}

#[derive(Serialize)]
struct RegressSummary {
    task: String,
    method: String,
    n_train: usize,
    n_test: usize,
    s: usize,
    ridge: f64,
    train_metric: f64,
    test_metric: f64,
    sample_seconds: f64,
    fit_seconds: f64,
    predict_seconds: f64,
    kernel_evals: u64,
}

fn rmse(pred: &[f64], truth: &[f64]) -> f64 {
    let n = pred.len().max(1);
    (pred
        .iter()
        .zip(truth.iter())
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / n as f64)
        .sqrt()
}

fn sign_error(pred: &[f64], truth: &[f64]) -> f64 {
    let n = pred.len().max(1);
    pred.iter()
        .zip(truth.iter())
        .filter(|(p, t)| (**p >= 0.0) != (**t >= 0.0))
        .count() as f64
        / n as f64
}

fn cmd_regress(args: &RegressArgs) -> Result<()> {
    let load = |path: &PathBuf| -> Result<Dataset> {
        load_dataset(&DataArgs {
            data: Some(path.clone()),
            format: args.format,
            label_column: args.label_column,
            standardize: false,
        })
    };
    let train = load(&args.train)?;
    let test = load(&args.test)?;
    let y_train = train
        .labels()
        .ok_or_else(|| Error::invalid_argument("training data has no labels"))?
        .clone();
    let y_test = test
        .labels()
        .ok_or_else(|| Error::invalid_argument("test data has no labels"))?
        .clone();
    let spec = args.sampler.kernel_spec()?;
    let counter = EvalCounter::new();

    // Random-features regression is a linear ridge fit in feature space.
    if args.method == BenchMethod::Rff {
        return regress_with_rff(args, &spec, &train, &test, &y_train, &y_test);
    }

    let sample_start = Instant::now();
    let sample = match args.method {
        BenchMethod::Uniform => {
            let s = args
                .sampler
                .size
                .ok_or_else(|| Error::invalid_argument("--size is required for uniform"))?;
            baselines::uniform_sample(train.n(), s.min(train.n()), args.sampler.seed)?
        }
        _ => {
            let mut a = args.sampler.clone();
            a.accelerated = a.accelerated || args.method == BenchMethod::RlsAccelerated;
            a.draw(&spec, &train, &counter)?.0
        }
    };
    let sample_seconds = sample_start.elapsed().as_secs_f64();

    let fit_start = Instant::now();
    let factors = nystrom::build_factors(&spec, &train, &sample, &counter)?;
    let model = downstream::krr_fit(&factors, &y_train, args.ridge)?;
    let fit_seconds = fit_start.elapsed().as_secs_f64();
    if let Some(path) = &args.save_model {
        let file = std::fs::File::create(path)?;
        downstream::save_krr_model(&model, &factors, std::io::BufWriter::new(file))?;
    }

    let predict_start = Instant::now();
    let train_pred = downstream::krr_fitted_values(&model, &factors)?;
    let mut test_pred = Vec::with_capacity(test.n());
    for i in 0..test.n() {
        test_pred.push(downstream::krr_predict(
            &model,
            &train,
            test.features().row(i),
            &counter,
        )?);
    }
    let predict_seconds = predict_start.elapsed().as_secs_f64();

    let (train_metric, test_metric, task) = match args.task {
        TaskArg::Regression => (
            rmse(train_pred.as_slice().unwrap(), y_train.as_slice().unwrap()),
            rmse(&test_pred, y_test.as_slice().unwrap()),
            "regression",
        ),
        TaskArg::Classification => (
            sign_error(train_pred.as_slice().unwrap(), y_train.as_slice().unwrap()),
            sign_error(&test_pred, y_test.as_slice().unwrap()),
            "classification",
        ),
    };
    let summary = RegressSummary {
        task: task.to_string(),
        method: args.method.name().to_string(),
        n_train: train.n(),
        n_test: test.n(),
        s: sample.len(),
        ridge: args.ridge,
        train_metric,
        test_metric,
        sample_seconds,
        fit_seconds,
        predict_seconds,
        kernel_evals: counter.count(),
    };
    println!("{}", serde_json::to_string(&summary).expect("serializable"));
    Ok(())
}

/// Linear ridge regression on the random-features embedding:
/// `w = (Z^T Z + lambda I)^-1 Z^T y` and predictions `z(x) . w`, which by
/// duality equals kernel ridge regression on the approximate Gram `Z Z^T`.
fn regress_with_rff(
    args: &RegressArgs,
    spec: &KernelSpec,
    train: &Dataset,
    test: &Dataset,
    y_train: &ndarray::Array1<f64>,
    y_test: &ndarray::Array1<f64>,
) -> Result<()> {
    if args.save_model.is_some() {
        return Err(Error::invalid_argument(
            "--save-model applies to landmark methods only",
        ));
    }
    let sigma = gaussian_sigma(spec)?;
    let d_features = args
        .sampler
        .size
        .ok_or_else(|| Error::invalid_argument("--size sets the rff feature count"))?;

    let sample_start = Instant::now();
    let map = baselines::rff_build(train.d(), d_features, sigma, args.sampler.seed)?;
    let z = baselines::rff_transform(&map, train)?;
    let sample_seconds = sample_start.elapsed().as_secs_f64();

    let fit_start = Instant::now();
    let mut core = z.t().dot(&z);
    for i in 0..d_features {
        core[[i, i]] += args.ridge;
    }
    let zty = z.t().dot(y_train);
    let chol = crate::linalg::PsdCholesky::factor_with_jitter(&core.view(), args.ridge * 1e-12)?;
    let weights = chol.solve_vec(&zty)?;
    let fit_seconds = fit_start.elapsed().as_secs_f64();

    let predict_start = Instant::now();
    let train_pred = z.dot(&weights);
    let z_test = baselines::rff_transform(&map, test)?;
    let test_pred = z_test.dot(&weights);
    let predict_seconds = predict_start.elapsed().as_secs_f64();

    let (train_metric, test_metric, task) = match args.task {
        TaskArg::Regression => (
            rmse(train_pred.as_slice().unwrap(), y_train.as_slice().unwrap()),
            rmse(test_pred.as_slice().unwrap(), y_test.as_slice().unwrap()),
            "regression",
        ),
        TaskArg::Classification => (
            sign_error(train_pred.as_slice().unwrap(), y_train.as_slice().unwrap()),
            sign_error(test_pred.as_slice().unwrap(), y_test.as_slice().unwrap()),
            "classification",
        ),
    };
    let summary = RegressSummary {
        task: task.to_string(),
        method: "rff".to_string(),
        n_train: train.n(),
        n_test: test.n(),
        s: d_features,
        ridge: args.ridge,
        train_metric,
        test_metric,
        sample_seconds,
        fit_seconds,
        predict_seconds,
        kernel_evals: 0,
    };
    println!("{}", serde_json::to_string(&summary).expect("serializable"));
    Ok(())
}

#[derive(Args)]
struct SynthArgs {
    /// Total number of points.
    #[arg(long, default_value_t = 4000)]
    n: usize,
    /// Fraction of points in the dominant cluster.
    #[arg(long, default_value_t = 0.9)]
    dominant_fraction: f64,
    /// Number of small satellite clusters.
    #[arg(long, default_value_t = 10)]
    clusters: usize,
    /// Center separation.
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    /// Within-cluster standard deviation.
    #[arg(long, default_value_t = 0.3)]
    spread: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let spec = synthetic::ClusterSpec::dominant_plus_satellites(
        args.n,
        args.dominant_fraction,
        args.clusters,
        args.separation,
        args.spread,
    )?;
    let dataset = synthetic::clustered_gaussian(&spec, args.seed);
    let mut text = String::new();
    for row in dataset.features().rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Args)]
struct VerifyArgs {
    /// `quick` finishes in under a minute; `full` runs every criterion.
    #[arg(long, value_enum, default_value_t = TierArg::Quick)]
    tier: TierArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TierArg {
    Quick,
    Full,
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let reports = match args.tier {
        TierArg::Quick => acceptance::run_quick(args.seed)?,
        TierArg::Full => acceptance::run_full(args.seed)?,
    };
    let mut failed = 0;
    for r in &reports {
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} criterion(s) failed");
        Ok(4)
    } else {
        Ok(0)
    }
}

/// Entry point shared by the binary and the integration tests. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return Ok(if help { 0 } else { 2 });
        }
    };
    match &cli.command {
        Command::Sample(a) => cmd_sample(a).map(|_| 0),
        Command::Approx(a) => cmd_approx(a).map(|_| 0),
        Command::Bench(a) => cmd_bench(a).map(|_| 0),
        Command::Regress(a) => cmd_regress(a).map(|_| 0),
        Command::Synth(a) => cmd_synth(a).map(|_| 0),
        Command::Verify(a) => cmd_verify(a),
    }
}
