//! Reproducible noise models and the L2 error metric.
//!
//! Every random stream is a ChaCha8 generator seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. ChaCha output is specified bit-for-bit,
//! so the same seed yields the same noisy image on every platform. Normal
//! variates are produced by the Box-Muller transform on that stream.

use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::ImageGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Gaussian,
    Salt,
    Pepper,
    SaltPepper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Standard deviation of the additive Gaussian noise.
    pub sigma: f64,
    /// Fraction of pixels hit by impulse noise.
    pub fraction: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Gaussian,
            sigma,
            fraction: 0.0,
            seed,
        }
    }

    pub fn impulse(kind: NoiseKind, fraction: f64, seed: u64) -> Self {
        Self {
            kind,
            sigma: 0.0,
            fraction,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::Gaussian if !(self.sigma >= 0.0 && self.sigma.is_finite()) => Err(
                Error::InvalidParameter(format!("gaussian sigma must be >= 0, got {}", self.sigma)),
            ),
            NoiseKind::Salt | NoiseKind::Pepper | NoiseKind::SaltPepper
                if !(0.0..=1.0).contains(&self.fraction) =>
            {
                Err(Error::InvalidParameter(format!(
                    "impulse fraction must lie in [0, 1], got {}",
                    self.fraction
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Uniform sample in `[0, 1)` with 53 random bits.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal variates via Box-Muller, two per pair of uniforms.
pub(crate) struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub(crate) fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub(crate) fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - U lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - uniform(&mut self.rng);
        let u2 = uniform(&mut self.rng);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Number of pixels selected by a fractional budget, `ceil(fraction * n)`.
///
/// A relative slack of 1e-12 keeps products such as `0.07 * 100` from rounding
/// up to the next integer.
pub fn budget_count(fraction: f64, n: usize) -> usize {
    let raw = fraction * n as f64;
    let k = (raw - raw.abs() * 1e-12).ceil().max(0.0) as usize;
    k.min(n)
}

/// `k` distinct pixel indices drawn uniformly, in draw order.
pub(crate) fn sample_indices(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    index::sample(&mut rng, n, k).into_vec()
}

pub fn apply_noise(img: &ImageGrid, spec: &NoiseSpec) -> Result<ImageGrid> {
    spec.validate()?;
    let mut out = img.clone();
    match spec.kind {
        NoiseKind::Gaussian => {
            if spec.sigma == 0.0 {
                return Ok(out);
            }
            let mut normals = NormalStream::new(spec.seed);
            for v in out.data_mut() {
                *v = (*v + spec.sigma * normals.next()).clamp(0.0, 1.0);
            }
        }
        kind => {
            let n = img.len();
            let k = budget_count(spec.fraction, n);
            let picked = sample_indices(n, k, spec.seed);
            let salt = match kind {
                NoiseKind::Salt => k,
                NoiseKind::Pepper => 0,
                _ => k.div_ceil(2),
            };
            let data = out.data_mut();
            for (j, &i) in picked.iter().enumerate() {
                data[i] = if j < salt { 1.0 } else { 0.0 };
            }
        }
    }
    Ok(out)
}

/// `sqrt(sum (a_i - b_i)^2)` over all pixels.
pub fn l2_error(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    a.ensure_same_shape(b.shape())?;
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> ImageGrid {
        ImageGrid::from_fn(w, h, |x, y| 0.2 + 0.6 * (x + y) as f64 / (w + h) as f64).unwrap()
    }

    #[test]
    fn zero_sigma_is_identity() {
        let img = ramp(8, 8);
        assert_eq!(apply_noise(&img, &NoiseSpec::gaussian(0.0, 1)).unwrap(), img);
    }

    #[test]
    fn gaussian_is_clamped_and_seeded() {
        let img = ramp(32, 32);
        let spec = NoiseSpec::gaussian(0.3, 17);
        let a = apply_noise(&img, &spec).unwrap();
        let b = apply_noise(&img, &spec).unwrap();
        assert_eq!(a, b);
        assert!(a.data().iter().all(|v| (0.0..=1.0).contains(v)));
        let c = apply_noise(&img, &NoiseSpec::gaussian(0.3, 18)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn normal_stream_moments() {
        let mut s = NormalStream::new(5);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| s.next()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.01);
    }

    #[test]
    fn salt_count_on_256_square() {
        let img = ImageGrid::filled(256, 256, 0.5).unwrap();
        let out = apply_noise(&img, &NoiseSpec::impulse(NoiseKind::Salt, 0.01, 3)).unwrap();
        assert_eq!(budget_count(0.01, 65536), 656);
        assert_eq!(out.data().iter().filter(|&&v| v == 1.0).count(), 656);
    }

    #[test]
    fn salt_pepper_split() {
        let img = ImageGrid::filled(11, 9, 0.5).unwrap();
        // ceil(0.05 * 99) = 5 pixels: 3 salt, 2 pepper.
        let out = apply_noise(&img, &NoiseSpec::impulse(NoiseKind::SaltPepper, 0.05, 3)).unwrap();
        assert_eq!(out.data().iter().filter(|&&v| v == 1.0).count(), 3);
        assert_eq!(out.data().iter().filter(|&&v| v == 0.0).count(), 2);
        let out = apply_noise(&img, &NoiseSpec::impulse(NoiseKind::Pepper, 0.05, 3)).unwrap();
        assert_eq!(out.data().iter().filter(|&&v| v == 0.0).count(), 5);
    }

    #[test]
    fn budget_rounding() {
        assert_eq!(budget_count(0.07, 100), 7);
        assert_eq!(budget_count(0.1, 65536), 6554);
        assert_eq!(budget_count(0.1, 1024), 103);
        assert_eq!(budget_count(1.0, 10), 10);
        assert_eq!(budget_count(0.0, 10), 0);
    }

    #[test]
    fn invalid_specs() {
        let img = ramp(4, 4);
        assert!(apply_noise(&img, &NoiseSpec::gaussian(-1.0, 0)).is_err());
        assert!(apply_noise(&img, &NoiseSpec::impulse(NoiseKind::Salt, 1.5, 0)).is_err());
    }

    #[test]
    fn l2_error_cases() {
        let a = ImageGrid::zeros(2, 2).unwrap();
        let b = ImageGrid::filled(2, 2, 0.5).unwrap();
        assert_eq!(l2_error(&a, &a).unwrap(), 0.0);
        assert_eq!(l2_error(&a, &b).unwrap(), 1.0);
        assert!(l2_error(&a, &ImageGrid::zeros(3, 2).unwrap()).is_err());

        let x = ramp(8, 8);
        let y = apply_noise(&x, &NoiseSpec::gaussian(0.2, 4)).unwrap();
        let mut acc = 0.0;
        for yy in 0..8 {
            for xx in 0..8 {
                let d = x.get(xx, yy) - y.get(xx, yy);
                acc += d * d;
            }
        }
        assert!((l2_error(&x, &y).unwrap() - acc.sqrt()).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn l2_is_a_metric(s1 in 0u64..1000, s2 in 0u64..1000, s3 in 0u64..1000) {
                let base = ramp(6, 5);
                let a = apply_noise(&base, &NoiseSpec::gaussian(0.3, s1)).unwrap();
                let b = apply_noise(&base, &NoiseSpec::gaussian(0.3, s2)).unwrap();
                let c = apply_noise(&base, &NoiseSpec::gaussian(0.3, s3)).unwrap();
                let ab = l2_error(&a, &b).unwrap();
                prop_assert!((ab - l2_error(&b, &a).unwrap()).abs() < 1e-9);
                prop_assert!(ab <= l2_error(&a, &c).unwrap() + l2_error(&c, &b).unwrap() + 1e-9);
            }

            #[test]
            fn impulse_changes_requested_count(frac in 0.0f64..1.0, seed in 0u64..100) {
                // Mid-gray input so every selected pixel visibly changes.
                let img = ImageGrid::filled(10, 10, 0.5).unwrap();
                let out = apply_noise(&img, &NoiseSpec::impulse(NoiseKind::SaltPepper, frac, seed)).unwrap();
                let changed = out.data().iter().filter(|&&v| v != 0.5).count();
                prop_assert_eq!(changed, budget_count(frac, 100));
            }
        }
    }
}
