//! Learning on top of the approximation: kernel ridge regression through a
//! Woodbury-style solve (only s x s systems, never an n x n inverse), and
//! k-means / PCA run directly on the explicit feature map, whose Gram
//! matrix equals the approximate kernel.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::{self, EvalCounter, KernelSpec};
use crate::linalg;
use crate::nystrom::NystromFactors;
use crate::sampler::mix_seed;
use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fitted approximate kernel ridge regression model.
#[derive(Debug, Clone)]
pub struct KRRModel {
    /// `(K_tilde + lambda I)^-1 y`.
    pub alpha: Array1<f64>,
    /// Precomputed `(S^T K S)^+ S^T K alpha`; prediction needs only `s`
    /// kernel evaluations against the landmarks plus one dot product.
    pub predictor_weights: Array1<f64>,
    pub landmark_indices: Vec<usize>,
    pub lambda: f64,
    pub kernel: KernelSpec,
}

/// Solve `(K_tilde + lambda I) alpha = y` through the factored identity
/// `(F F^T + lambda I)^-1 = (1/lambda)(I - F (F^T F + lambda I)^-1 F^T)`
/// with `F` the feature map, so only s x s systems are factored.
pub fn krr_fit(factors: &NystromFactors, y: &Array1<f64>, lambda: f64) -> Result<KRRModel> {
    if !(lambda > 0.0) {
        return Err(Error::invalid_argument(
            "ridge regression requires lambda > 0",
        ));
    }
    if y.len() != factors.n() {
        return Err(Error::invalid_argument(format!(
            "labels length {} does not match n = {}",
            y.len(),
            factors.n()
        )));
    }
    let f = factors.feature_map()?;
    let s = f.ncols();
    let mut core = f.t().dot(&f);
    for i in 0..s {
        core[[i, i]] += lambda;
    }
    let chol = linalg::PsdCholesky::factor_with_jitter(&core.view(), lambda * 1e-12)?;
    let fty = f.t().dot(y);
    let inner = chol.solve_vec(&fty)?;
    let alpha = (y - &f.dot(&inner)) / lambda;
    let predictor_weights = factors.winv().dot(&factors.columns().t().dot(&alpha));
    Ok(KRRModel {
        alpha,
        predictor_weights,
        landmark_indices: factors.landmark_indices().to_vec(),
        lambda,
        kernel: factors.kernel().clone(),
    })
}

/// Predict a single point: exactly `s` kernel evaluations against the
/// landmarks, then an s-length dot product.
pub fn krr_predict(
    model: &KRRModel,
    data: &Dataset,
    x_new: ArrayView1<f64>,
    counter: &EvalCounter,
) -> Result<f64> {
    if x_new.len() != data.d() {
        return Err(Error::invalid_argument(format!(
            "query dimension {} does not match d = {}",
            x_new.len(),
            data.d()
        )));
    }
    let mut acc = 0.0;
    for (j, &idx) in model.landmark_indices.iter().enumerate() {
        let k = kernel::eval(&model.kernel, data.features().row(idx), x_new, counter)?;
        acc += k * model.predictor_weights[j];
    }
    Ok(acc)
}

/// In-sample fitted values `K_tilde alpha` via the factor path.
pub fn krr_fitted_values(model: &KRRModel, factors: &NystromFactors) -> Result<Array1<f64>> {
    factors.matvec(&model.alpha)
}

const KRR_MAGIC: &[u8; 8] = b"RLSNYKR1";

/// Serialize a fitted model together with its factors container, so a
/// single file restores both.
pub fn save_krr_model(
    model: &KRRModel,
    factors: &NystromFactors,
    mut w: impl std::io::Write,
) -> Result<()> {
    w.write_all(KRR_MAGIC)?;
    factors.write_to(&mut w)?;
    w.write_all(&model.lambda.to_le_bytes())?;
    for v in model.alpha.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in model.predictor_weights.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn load_krr_model(mut r: impl std::io::Read) -> Result<(KRRModel, NystromFactors)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != KRR_MAGIC {
        return Err(Error::invalid_argument(
            "not a ridge model container (bad magic)",
        ));
    }
    let factors = NystromFactors::read_from(&mut r)?;
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    let lambda = f64::from_le_bytes(buf);
    let read_f64s = |len: usize, r: &mut dyn std::io::Read| -> Result<Array1<f64>> {
        let mut out = Vec::with_capacity(len);
        let mut b = [0u8; 8];
        for _ in 0..len {
            r.read_exact(&mut b)?;
            out.push(f64::from_le_bytes(b));
        }
        Ok(Array1::from(out))
    };
    let alpha = read_f64s(factors.n(), &mut r)?;
    let predictor_weights = read_f64s(factors.s(), &mut r)?;
    let model = KRRModel {
        alpha,
        predictor_weights,
        landmark_indices: factors.landmark_indices().to_vec(),
        lambda,
        kernel: factors.kernel().clone(),
    };
    Ok((model, factors))
}

fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with distance-squared-proportional seeding, best of
/// `restarts`. Returns per-point labels and the within-cluster squared
/// distance objective.
pub fn kmeans_on_features(
    features: &Array2<f64>,
    k: usize,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> Result<(Vec<usize>, f64)> {
    let n = features.nrows();
    if k < 1 || k > n {
        return Err(Error::invalid_argument(format!(
            "kmeans requires 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let restarts = restarts.max(1);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for r in 0..restarts {
        let candidate = lloyd_once(features, k, iterations, mix_seed(seed, r as u64))?;
        if best.as_ref().is_none_or(|(_, obj)| candidate.1 < *obj) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn lloyd_once(
    features: &Array2<f64>,
    k: usize,
    iterations: usize,
    seed: u64,
) -> Result<(Vec<usize>, f64)> {
    let n = features.nrows();
    let d = features.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ style seeding.
    let mut centers = Array2::zeros((k, d));
    let first = rng.gen_range(0..n);
    centers.row_mut(0).assign(&features.row(first));
    let mut dist2: Vec<f64> = (0..n)
        .map(|i| squared_distance(features.row(i), centers.row(0)))
        .collect();
    for c in 1..k {
        let total: f64 = dist2.iter().sum();
        let chosen = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in dist2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        };
        centers.row_mut(c).assign(&features.row(chosen));
        for (i, d) in dist2.iter_mut().enumerate() {
            *d = d.min(squared_distance(features.row(i), centers.row(c)));
        }
    }

    let mut labels = vec![0usize; n];
    let mut objective = f64::INFINITY;
    for _ in 0..iterations.max(1) {
        // Assignment step.
        let mut new_objective = 0.0;
        for (i, label) in labels.iter_mut().enumerate() {
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let d2 = squared_distance(features.row(i), centers.row(c));
                if d2 < best_d {
                    best_d = d2;
                    best_c = c;
                }
            }
            *label = best_c;
            new_objective += best_d;
        }
        debug_assert!(
            new_objective <= objective * (1.0 + 1e-9) + 1e-9,
            "Lloyd objective must not increase: {objective} -> {new_objective}"
        );
        let converged = objective.is_finite() && (objective - new_objective).abs() <= 1e-12;
        objective = new_objective;
        if converged {
            break;
        }
        // Update step.
        let mut counts = vec![0usize; k];
        let mut sums = Array2::<f64>::zeros((k, d));
        for i in 0..n {
            counts[labels[i]] += 1;
            let mut row = sums.row_mut(labels[i]);
            row += &features.row(i);
        }
        for (c, &count) in counts.iter().enumerate() {
            if count == 0 {
                // Reassign an empty cluster to the point farthest from its
                // current center.
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = squared_distance(features.row(a), centers.row(labels[a]));
                        let db = squared_distance(features.row(b), centers.row(labels[b]));
                        da.partial_cmp(&db).unwrap()
                    })
                    .expect("nonempty data");
                centers.row_mut(c).assign(&features.row(far));
            } else {
                let scale = 1.0 / count as f64;
                let mut row = centers.row_mut(c);
                row.assign(&sums.row(c));
                row *= scale;
            }
        }
    }
    // Final assignment to make labels and objective consistent.
    let mut final_objective = 0.0;
    for (i, label) in labels.iter_mut().enumerate() {
        let mut best_c = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let d2 = squared_distance(features.row(i), centers.row(c));
            if d2 < best_d {
                best_d = d2;
                best_c = c;
            }
        }
        *label = best_c;
        final_objective += best_d;
    }
    Ok((labels, final_objective))
}

/// Top-k principal directions of the feature matrix.
///
/// Returns the s x k orthonormal component matrix (right singular vectors)
/// and the captured energy (sum of the top-k squared singular values).
/// Projecting data is `features . components`.
pub fn kpca_on_features(features: &Array2<f64>, k: usize) -> Result<(Array2<f64>, f64)> {
    let s = features.ncols();
    if k < 1 {
        return Err(Error::invalid_argument("kpca requires k >= 1"));
    }
    let gram = features.t().dot(features);
    let eig = linalg::sym_eigh(&gram.view())?;
    let max = eig.values.iter().cloned().fold(0.0f64, f64::max);
    let tol = s as f64 * f64::EPSILON * max;
    let rank = eig.values.iter().filter(|&&v| v > tol).count();
    if k > rank {
        return Err(Error::invalid_argument(format!(
            "kpca k = {k} exceeds feature rank {rank}"
        )));
    }
    let mut components = Array2::zeros((s, k));
    let mut captured = 0.0;
    for j in 0..k {
        let src = s - 1 - j; // eigenvalues ascend; take from the top
        components.column_mut(j).assign(&eig.vectors.column(src));
        captured += eig.values[src].max(0.0);
    }
    Ok((components, captured))
}
