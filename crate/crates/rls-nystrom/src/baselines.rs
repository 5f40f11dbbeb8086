//! The two comparison methods: uniform-landmark Nystrom selection and
//! random Fourier features for the Gaussian kernel.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::sampler::LandmarkSample;
use ndarray::{Array1, Array2};
use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Uniform landmark selection: `s` distinct indices without replacement.
/// Probabilities are recorded as `s/n`; weights stay at one because the
/// uniform baseline never reweights columns.
pub fn uniform_sample(n: usize, s: usize, seed: u64) -> Result<LandmarkSample> {
    if s < 1 || s > n {
        return Err(Error::invalid_argument(format!(
            "uniform sample size {s} out of range [1, {n}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = index_sample(&mut rng, n, s).into_vec();
    indices.sort_unstable();
    let p = s as f64 / n as f64;
    LandmarkSample::with_unit_weights(indices, vec![p; s])
}

/// A random Fourier feature map for the Gaussian kernel
/// `exp(-||x - y||^2 / (2 sigma^2))`: frequencies are spherical normal with
/// deviation `1/sigma` per coordinate, phases uniform on `[0, 2pi)`, and
/// features `z_j(x) = sqrt(2/D) cos(w_j . x + b_j)`.
#[derive(Debug, Clone)]
pub struct RFFMap {
    frequencies: Array2<f64>,
    phases: Array1<f64>,
    sigma: f64,
}

const RFF_MAGIC: &[u8; 8] = b"RLSNYRF1";

impl RFFMap {
    pub fn d(&self) -> usize {
        self.frequencies.ncols()
    }

    pub fn feature_count(&self) -> usize {
        self.frequencies.nrows()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn frequencies(&self) -> &Array2<f64> {
        &self.frequencies
    }

    pub fn phases(&self) -> &Array1<f64> {
        &self.phases
    }

    /// Binary container, distinguishable from the Nystrom factors container
    /// by its magic bytes.
    pub fn write_to(&self, mut w: impl std::io::Write) -> Result<()> {
        w.write_all(RFF_MAGIC)?;
        w.write_all(&(self.feature_count() as u64).to_le_bytes())?;
        w.write_all(&(self.d() as u64).to_le_bytes())?;
        w.write_all(&self.sigma.to_le_bytes())?;
        for v in self.frequencies.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in self.phases.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl std::io::Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != RFF_MAGIC {
            return Err(Error::invalid_argument("not an rff container (bad magic)"));
        }
        let mut buf = [0u8; 8];
        let mut next = |r: &mut dyn std::io::Read| -> Result<u64> {
            r.read_exact(&mut buf)?;
            Ok(u64::from_le_bytes(buf))
        };
        let count = next(&mut r)? as usize;
        let d = next(&mut r)? as usize;
        let mut f8 = [0u8; 8];
        r.read_exact(&mut f8)?;
        let sigma = f64::from_le_bytes(f8);
        let read_f64s = |len: usize, r: &mut dyn std::io::Read| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(len);
            let mut b = [0u8; 8];
            for _ in 0..len {
                r.read_exact(&mut b)?;
                out.push(f64::from_le_bytes(b));
            }
            Ok(out)
        };
        let frequencies =
            Array2::from_shape_vec((count, d), read_f64s(count * d, &mut r)?).expect("shape");
        let phases = Array1::from(read_f64s(count, &mut r)?);
        Ok(RFFMap {
            frequencies,
            phases,
            sigma,
        })
    }
}

/// Draw a seeded random Fourier feature map with `feature_count` features
/// for inputs of dimension `d`.
pub fn rff_build(d: usize, feature_count: usize, sigma: f64, seed: u64) -> Result<RFFMap> {
    if feature_count < 1 {
        return Err(Error::invalid_argument("rff needs at least one feature"));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid_argument("rff requires sigma > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frequencies = Array2::from_shape_fn((feature_count, d), |_| {
        rng.sample::<f64, _>(StandardNormal) / sigma
    });
    let phases = Array1::from_shape_fn(feature_count, |_| rng.gen::<f64>() * 2.0 * PI);
    Ok(RFFMap {
        frequencies,
        phases,
        sigma,
    })
}

/// Apply the map: the n x D matrix `Z` whose Gram `Z Z^T` is an unbiased
/// estimate of the Gaussian kernel matrix.
pub fn rff_transform(map: &RFFMap, data: &Dataset) -> Result<Array2<f64>> {
    if data.d() != map.d() {
        return Err(Error::invalid_argument(format!(
            "rff map expects d = {}, dataset has d = {}",
            map.d(),
            data.d()
        )));
    }
    let scale = (2.0 / map.feature_count() as f64).sqrt();
    let mut z = data.features().dot(&map.frequencies.t());
    for mut row in z.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = scale * (*v + map.phases[j]).cos();
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn exhaustive_uniform_sample() {
        let s = uniform_sample(5, 5, 1).unwrap();
        assert_eq!(s.indices(), &[0, 1, 2, 3, 4]);
        assert!(s.weights().iter().all(|&w| w == 1.0));
        assert!(s.probabilities().iter().all(|&p| p == 1.0));
    }

    #[test]
    fn singleton_uniform_sample() {
        let s = uniform_sample(1, 1, 9).unwrap();
        assert_eq!(s.indices(), &[0]);
    }

    #[test]
    fn uniform_sample_rejects_oversized_request() {
        assert!(uniform_sample(4, 5, 0).is_err());
        assert!(uniform_sample(4, 0, 0).is_err());
    }

    #[test]
    fn uniform_inclusion_frequencies_are_uniform() {
        let n = 10_000;
        let s = 100;
        let trials = 1000;
        let mut counts = vec![0usize; n];
        for seed in 0..trials {
            let sample = uniform_sample(n, s, seed as u64).unwrap();
            for &i in sample.indices() {
                counts[i] += 1;
            }
        }
        let p = s as f64 / n as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        // Per-index deviations in units of the standard error. Checking all
        // 10^4 indices at once needs a simultaneous threshold (4.5 sigma);
        // the vast majority must still sit within the pointwise 3 sigma.
        let mut within_three = 0usize;
        for &c in &counts {
            let dev = ((c as f64 / trials as f64) - p).abs() / se;
            assert!(dev <= 4.5, "index deviates by {dev} standard errors");
            if dev <= 3.0 {
                within_three += 1;
            }
        }
        assert!(
            within_three as f64 >= 0.99 * n as f64,
            "only {within_three}/{n} indices within 3 standard errors"
        );
    }

    #[test]
    fn rff_is_seed_deterministic() {
        let a = rff_build(3, 64, 1.5, 77).unwrap();
        let b = rff_build(3, 64, 1.5, 77).unwrap();
        assert_eq!(a.frequencies(), b.frequencies());
        assert_eq!(a.phases(), b.phases());
        let c = rff_build(3, 64, 1.5, 78).unwrap();
        assert_ne!(a.frequencies(), c.frequencies());
    }

    #[test]
    fn frequency_norms_match_chi_square_moment() {
        // E ||w||^2 sigma^2 = d for spherical normal frequencies.
        let d = 4;
        let count = 100_000;
        let sigma = 2.0;
        let map = rff_build(d, count, sigma, 13).unwrap();
        let mean_sq: f64 = map
            .frequencies()
            .rows()
            .into_iter()
            .map(|r| r.dot(&r) * sigma * sigma)
            .sum::<f64>()
            / count as f64;
        assert!(
            (mean_sq - d as f64).abs() <= 0.02 * d as f64,
            "mean squared norm {mean_sq}"
        );
    }

    #[test]
    fn phases_pass_uniformity_ks_test() {
        let count = 100_000;
        let map = rff_build(2, count, 1.0, 29).unwrap();
        let mut phases: Vec<f64> = map.phases().iter().map(|&b| b / (2.0 * PI)).collect();
        phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, &u) in phases.iter().enumerate() {
            let lo = i as f64 / count as f64;
            let hi = (i + 1) as f64 / count as f64;
            ks = ks.max((u - lo).abs()).max((hi - u).abs());
        }
        // 1% critical value for the one-sample KS statistic.
        let critical = 1.63 / (count as f64).sqrt();
        assert!(ks <= critical, "ks {ks} critical {critical}");
        assert!(phases.iter().all(|&u| (0.0..1.0).contains(&u)));
    }

    #[test]
    fn rff_gram_converges_to_gaussian_kernel() {
        let sigma = 1.3;
        let count = 10_000;
        let map = rff_build(2, count, sigma, 3).unwrap();
        // Same point: K(x, x) = 1.
        let data = Dataset::new(array![[0.4, -0.2], [0.4, -0.2]], None).unwrap();
        let z = rff_transform(&map, &data).unwrap();
        let same = z.row(0).dot(&z.row(1));
        assert!((same - 1.0).abs() <= 0.05, "same-point estimate {same}");

        // Distance 2 sigma: K = exp(-2).
        let far = Dataset::new(array![[0.0, 0.0], [2.0 * sigma, 0.0]], None).unwrap();
        let zf = rff_transform(&map, &far).unwrap();
        let cross = zf.row(0).dot(&zf.row(1));
        assert!(
            (cross - (-2.0f64).exp()).abs() <= 0.05,
            "cross estimate {cross}"
        );
    }

    #[test]
    fn single_feature_entries_bounded_by_sqrt_two() {
        let map = rff_build(3, 1, 0.9, 5).unwrap();
        let data = Dataset::new(array![[1.0, 2.0, 3.0], [-1.0, 0.0, 1.0]], None).unwrap();
        let z = rff_transform(&map, &data).unwrap();
        assert!(z.iter().all(|v| v.abs() <= 2f64.sqrt() + 1e-12));
    }

    #[test]
    fn rff_map_round_trips_through_container() {
        let map = rff_build(5, 32, 1.7, 21).unwrap();
        let mut buf = Vec::new();
        map.write_to(&mut buf).unwrap();
        let back = RFFMap::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.frequencies(), map.frequencies());
        assert_eq!(back.phases(), map.phases());
        assert_eq!(back.sigma(), map.sigma());
    }

    #[test]
    fn rff_transform_rejects_dimension_mismatch() {
        let map = rff_build(3, 8, 1.0, 1).unwrap();
        let data = Dataset::new(array![[1.0, 2.0]], None).unwrap();
        assert!(rff_transform(&map, &data).is_err());
    }
}
