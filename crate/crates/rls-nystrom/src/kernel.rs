//! Kernel functions with exact accounting of scalar kernel evaluations.
//!
//! The evaluation count is the primary cost metric for every sampling
//! routine in this crate: vectorized code paths still add the exact logical
//! number of `K(x, y)` evaluations they correspond to.

use crate::data::Dataset;
use crate::error::{Error, Result};
use ndarray::{Array1, Array2, ArrayView1};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

/// Kernel function descriptor. Immutable; share freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `exp(-||x - y||^2 / (2 sigma^2))`
    Gaussian { sigma: f64 },
    /// `<x, y>`
    Linear,
    /// `(<x, y> + offset)^degree`
    Polynomial { degree: u32, offset: f64 },
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::invalid_argument(
                "gaussian kernel requires sigma > 0",
            ));
        }
        Ok(KernelSpec::Gaussian { sigma })
    }

    pub fn polynomial(degree: u32, offset: f64) -> Result<Self> {
        if degree < 1 {
            return Err(Error::invalid_argument(
                "polynomial kernel requires degree >= 1",
            ));
        }
        if offset < 0.0 {
            return Err(Error::invalid_argument(
                "polynomial kernel requires offset >= 0",
            ));
        }
        Ok(KernelSpec::Polynomial { degree, offset })
    }

    fn apply_dot(&self, dot: f64, sq_x: f64, sq_y: f64) -> f64 {
        match self {
            KernelSpec::Gaussian { sigma } => {
                let dist2 = (sq_x + sq_y - 2.0 * dot).max(0.0);
                (-dist2 / (2.0 * sigma * sigma)).exp()
            }
            KernelSpec::Linear => dot,
            KernelSpec::Polynomial { degree, offset } => (dot + offset).powi(*degree as i32),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Gaussian { sigma } => write!(f, "gaussian:sigma={sigma}"),
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Polynomial { degree, offset } => {
                write!(f, "poly:degree={degree},offset={offset}")
            }
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    /// Parses config strings like `gaussian:sigma=2.5`, `linear`,
    /// `poly:degree=3,offset=1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k, r),
            None => (s, ""),
        };
        let mut params = std::collections::BTreeMap::new();
        if !rest.is_empty() {
            for pair in rest.split(',') {
                let (key, value) = pair.split_once('=').ok_or_else(|| {
                    Error::invalid_argument(format!("bad kernel parameter `{pair}`"))
                })?;
                let value: f64 = value.trim().parse().map_err(|_| {
                    Error::invalid_argument(format!("bad kernel parameter value `{value}`"))
                })?;
                params.insert(key.trim().to_string(), value);
            }
        }
        match kind {
            "gaussian" | "rbf" => {
                let sigma = *params
                    .get("sigma")
                    .ok_or_else(|| Error::invalid_argument("gaussian kernel needs sigma=<w>"))?;
                KernelSpec::gaussian(sigma)
            }
            "linear" => Ok(KernelSpec::Linear),
            "poly" | "polynomial" => {
                let degree = *params
                    .get("degree")
                    .ok_or_else(|| Error::invalid_argument("poly kernel needs degree=<d>"))?;
                if degree.fract() != 0.0 || degree < 1.0 {
                    return Err(Error::invalid_argument(
                        "poly degree must be a positive integer",
                    ));
                }
                let offset = params.get("offset").copied().unwrap_or(0.0);
                KernelSpec::polynomial(degree as u32, offset)
            }
            other => Err(Error::invalid_argument(format!(
                "unknown kernel kind `{other}`"
            ))),
        }
    }
}

/// Monotone counter of scalar kernel evaluations. Safe for concurrent use.
#[derive(Debug, Default)]
pub struct EvalCounter {
    count: AtomicU64,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, n: u64) {
        self.count.fetch_add(n, Ordering::Relaxed);
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

/// Single kernel evaluation; increments the counter by one.
pub fn eval(
    spec: &KernelSpec,
    x: ArrayView1<f64>,
    y: ArrayView1<f64>,
    counter: &EvalCounter,
) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid_argument(format!(
            "kernel eval: dimension mismatch ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    counter.add(1);
    let dot = x.dot(&y);
    Ok(spec.apply_dot(dot, x.dot(&x), y.dot(&y)))
}

fn squared_norms(rows: &Array2<f64>) -> Array1<f64> {
    rows.rows().into_iter().map(|r| r.dot(&r)).collect()
}

/// `K[row_ids, col_ids]` evaluated blockwise via inner products.
/// Adds `row_ids.len() * col_ids.len()` to the counter.
pub(crate) fn kernel_cross(
    spec: &KernelSpec,
    data: &Dataset,
    row_ids: &[usize],
    col_ids: &[usize],
    counter: &EvalCounter,
) -> Result<Array2<f64>> {
    let n = data.n();
    for &i in row_ids.iter().chain(col_ids.iter()) {
        if i >= n {
            return Err(Error::invalid_argument(format!(
                "kernel_cross: index {i} out of range for n={n}"
            )));
        }
    }
    counter.add((row_ids.len() as u64) * (col_ids.len() as u64));
    let rows = data.select_rows(row_ids);
    let cols = data.select_rows(col_ids);
    let dots = rows.dot(&cols.t());
    let out = match spec {
        KernelSpec::Linear => dots,
        _ => {
            let sq_r = squared_norms(&rows);
            let sq_c = squared_norms(&cols);
            let mut out = dots;
            for (i, mut row) in out.rows_mut().into_iter().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = spec.apply_dot(*v, sq_r[i], sq_c[j]);
                }
            }
            out
        }
    };
    Ok(out)
}

/// The n x s matrix of kernel values against the given landmarks:
/// column j holds `K(x_i, x_{landmarks[j]})` for every data point i.
/// Adds `n * landmarks.len()` to the counter.
pub fn kernel_columns(
    spec: &KernelSpec,
    data: &Dataset,
    landmarks: &[usize],
    counter: &EvalCounter,
) -> Result<Array2<f64>> {
    let all: Vec<usize> = (0..data.n()).collect();
    kernel_cross(spec, data, &all, landmarks, counter)
}

/// Diagonal of the kernel matrix; adds n to the counter.
pub fn kernel_diagonal(spec: &KernelSpec, data: &Dataset, counter: &EvalCounter) -> Array1<f64> {
    let all: Vec<usize> = (0..data.n()).collect();
    kernel_diagonal_subset(spec, data, &all, counter)
}

/// Diagonal entries `K(x_i, x_i)` for the given rows; adds `rows.len()`.
pub(crate) fn kernel_diagonal_subset(
    spec: &KernelSpec,
    data: &Dataset,
    rows: &[usize],
    counter: &EvalCounter,
) -> Array1<f64> {
    counter.add(rows.len() as u64);
    rows.iter()
        .map(|&i| {
            let r = data.features().row(i);
            let sq = r.dot(&r);
            spec.apply_dot(sq, sq, sq)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use ndarray::array;

    fn dataset(rows: Array2<f64>) -> Dataset {
        Dataset::new(rows, None).unwrap()
    }

    #[test]
    fn gaussian_at_zero_distance_is_one() {
        let spec = KernelSpec::gaussian(0.7).unwrap();
        let c = EvalCounter::new();
        let x = array![1.0, -2.0, 3.0];
        let v = eval(&spec, x.view(), x.view(), &c).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(c.count(), 1);
    }

    #[test]
    fn linear_dot_product() {
        let c = EvalCounter::new();
        let v = eval(
            &KernelSpec::Linear,
            array![1.0, 2.0].view(),
            array![3.0, 4.0].view(),
            &c,
        )
        .unwrap();
        assert_eq!(v, 11.0);
    }

    #[test]
    fn gaussian_closed_form() {
        // sigma = 1, x = [0], y = [2] -> exp(-4/2) = exp(-2)
        let spec = KernelSpec::gaussian(1.0).unwrap();
        let c = EvalCounter::new();
        let v = eval(&spec, array![0.0].view(), array![2.0].view(), &c).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-12);
        assert!((v - 0.135335).abs() < 1e-6);
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        let c = EvalCounter::new();
        let r = eval(
            &KernelSpec::Linear,
            array![1.0].view(),
            array![1.0, 2.0].view(),
            &c,
        );
        assert!(r.is_err());
        assert_eq!(c.count(), 0);
    }

    #[test]
    fn full_selection_gives_gram_matrix() {
        let data = dataset(array![[1.0, 0.0], [0.0, 2.0]]);
        let c = EvalCounter::new();
        let cols = kernel_columns(&KernelSpec::Linear, &data, &[0, 1], &c).unwrap();
        assert_eq!(cols, array![[1.0, 0.0], [0.0, 4.0]]);
        assert_eq!(c.count(), 4);
    }

    #[test]
    fn empty_selection_leaves_counter_untouched() {
        let data = dataset(array![[1.0], [2.0], [3.0]]);
        let c = EvalCounter::new();
        let cols = kernel_columns(&KernelSpec::Linear, &data, &[], &c).unwrap();
        assert_eq!(cols.dim(), (3, 0));
        assert_eq!(c.count(), 0);
    }

    #[test]
    fn orthonormal_rows_select_identity_column() {
        let data = dataset(array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let c = EvalCounter::new();
        let cols = kernel_columns(&KernelSpec::Linear, &data, &[0], &c).unwrap();
        assert_eq!(cols, array![[1.0], [0.0], [0.0]]);
    }

    #[test]
    fn gaussian_diagonal_is_all_ones() {
        let data = dataset(array![[1.0, 5.0], [-3.0, 0.5], [2.0, 2.0]]);
        let c = EvalCounter::new();
        let d = kernel_diagonal(&KernelSpec::gaussian(2.0).unwrap(), &data, &c);
        assert!(d.iter().all(|&v| v == 1.0));
        assert_eq!(c.count(), 3);
    }

    #[test]
    fn linear_diagonal_is_squared_norms() {
        let data = dataset(array![[1.0, 0.0], [0.0, 2.0]]);
        let c = EvalCounter::new();
        let d = kernel_diagonal(&KernelSpec::Linear, &data, &c);
        assert_eq!(d, array![1.0, 4.0]);
    }

    #[test]
    fn polynomial_diagonal_closed_form() {
        // degree 2, offset 1, row [1] -> (1 + 1)^2 = 4
        let data = dataset(array![[1.0]]);
        let c = EvalCounter::new();
        let d = kernel_diagonal(&KernelSpec::polynomial(2, 1.0).unwrap(), &data, &c);
        assert!((d[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_landmark_is_an_error() {
        let data = dataset(array![[1.0], [2.0]]);
        let c = EvalCounter::new();
        assert!(kernel_columns(&KernelSpec::Linear, &data, &[2], &c).is_err());
    }

    #[test]
    fn config_string_round_trip() {
        for s in ["gaussian:sigma=2.5", "linear", "poly:degree=3,offset=1"] {
            let spec: KernelSpec = s.parse().unwrap();
            let back: KernelSpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, back);
        }
        assert!("gaussian:sigma=-1".parse::<KernelSpec>().is_err());
        assert!("mystery".parse::<KernelSpec>().is_err());
    }
}
