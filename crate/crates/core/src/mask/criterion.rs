use crate::error::{Error, Result};
use crate::image::{gaussian_blur, laplacian, ImageGrid};

/// Nonnegative per-pixel saliency; larger values are kept first.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionField(ImageGrid);

impl CriterionField {
    pub fn new(values: ImageGrid) -> Result<Self> {
        if let Some(v) = values.data().iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "criterion values must be finite and >= 0, found {v}"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &ImageGrid {
        &self.0
    }

    pub fn into_inner(self) -> ImageGrid {
        self.0
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiplies every value by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be > 0, got {factor}")));
        }
        Self::new(self.0.map(|v| v * factor))
    }
}

/// Gaussian presmoothing; `sigma == 0` returns the input unchanged.
pub fn presmooth(f: &ImageGrid, sigma: f64) -> ImageGrid {
    if sigma > 0.0 {
        gaussian_blur(f, sigma)
    } else {
        f.clone()
    }
}

fn squared(img: ImageGrid) -> CriterionField {
    CriterionField(img.map(|v| v * v))
}

/// `(f_s - alpha Lap f_s)^2` with `f_s` the presmoothed image.
pub fn criterion_stationary(f: &ImageGrid, alpha: f64, presmooth_sigma: f64) -> CriterionField {
    let fs = presmooth(f, presmooth_sigma);
    let lap = laplacian(&fs);
    let filtered = fs
        .zip_map(&lap, |a, l| a - alpha * l)
        .expect("laplacian preserves shape");
    squared(filtered)
}

/// `(f_s - dt alpha Lap f_s - u_n)^2`.
pub fn criterion_timedep(
    f: &ImageGrid,
    u_n: &ImageGrid,
    alpha: f64,
    dt: f64,
    presmooth_sigma: f64,
) -> Result<CriterionField> {
    f.ensure_same_shape(u_n.shape())?;
    let fs = presmooth(f, presmooth_sigma);
    let lap = laplacian(&fs);
    let coeff = dt * alpha;
    let data = fs
        .data()
        .iter()
        .zip(lap.data())
        .zip(u_n.data())
        .map(|((a, l), u)| {
            let d = a - coeff * l - u;
            d * d
        })
        .collect();
    Ok(CriterionField(ImageGrid::new(f.width(), f.height(), data)?))
}

/// `(Lap f_s)^2`, the homogeneous-diffusion saliency.
pub fn h1_criterion(f: &ImageGrid, presmooth_sigma: f64) -> CriterionField {
    squared(laplacian(&presmooth(f, presmooth_sigma)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(w: usize, h: usize, seed: u64) -> ImageGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ImageGrid::from_fn(w, h, |_, _| rng.gen::<f64>()).unwrap()
    }

    /// Neighbour sum with mirrored ghost cells, written out independently.
    fn lap_oracle(f: &ImageGrid, x: usize, y: usize) -> f64 {
        let (w, h) = f.shape();
        let xm = if x == 0 { 0 } else { x - 1 };
        let xp = if x + 1 == w { x } else { x + 1 };
        let ym = if y == 0 { 0 } else { y - 1 };
        let yp = if y + 1 == h { y } else { y + 1 };
        f.get(xm, y) + f.get(xp, y) + f.get(x, ym) + f.get(x, yp) - 4.0 * f.get(x, y)
    }

    #[test]
    fn constant_image() {
        let f = ImageGrid::filled(6, 5, 0.3).unwrap();
        let crit = criterion_stationary(&f, 4.0, 0.0);
        assert!(crit.values().data().iter().all(|v| (v - 0.09).abs() < 1e-15));
        assert!(h1_criterion(&f, 0.0).values().data().iter().all(|&v| v == 0.0));
        let zero = ImageGrid::zeros(6, 5).unwrap();
        assert!(criterion_stationary(&zero, 4.0, 1.0).values().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn stationary_matches_oracle() {
        let f = random_image(5, 5, 11);
        let crit = criterion_stationary(&f, 3.0, 0.0);
        for y in 0..5 {
            for x in 0..5 {
                let g = f.get(x, y) - 3.0 * lap_oracle(&f, x, y);
                assert!((crit.values().get(x, y) - g * g).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn timedep_reductions() {
        let f = random_image(4, 4, 12);
        let u = random_image(4, 4, 13);
        let crit = criterion_timedep(&f, &u, 2.0, 0.1, 0.0).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                let g = f.get(x, y) - 0.2 * lap_oracle(&f, x, y) - u.get(x, y);
                assert!((crit.values().get(x, y) - g * g).abs() < 1e-12);
            }
        }

        let zero = ImageGrid::zeros(4, 4).unwrap();
        let a = criterion_timedep(&f, &zero, 2.0, 0.1, 0.0).unwrap();
        let b = criterion_stationary(&f, 0.2, 0.0);
        for (p, q) in a.values().data().iter().zip(b.values().data()) {
            assert!((p - q).abs() < 1e-14);
        }

        // u_n = f leaves the scaled H1 criterion.
        let same = criterion_timedep(&f, &f, 2.0, 0.1, 0.0).unwrap();
        let h1 = h1_criterion(&f, 0.0);
        for (p, q) in same.values().data().iter().zip(h1.values().data()) {
            assert!((p - 0.04 * q).abs() < 1e-12);
        }
        assert!(criterion_timedep(&f, &ImageGrid::zeros(5, 4).unwrap(), 1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn h1_matches_oracle_and_vanishes_on_ramps() {
        let f = random_image(5, 5, 14);
        let crit = h1_criterion(&f, 0.0);
        for y in 0..5 {
            for x in 0..5 {
                let l = lap_oracle(&f, x, y);
                assert!((crit.values().get(x, y) - l * l).abs() < 1e-12);
            }
        }
        let ramp = ImageGrid::from_fn(7, 7, |x, y| 0.1 * x as f64 + 0.05 * y as f64).unwrap();
        let crit = h1_criterion(&ramp, 0.0);
        for y in 1..6 {
            for x in 1..6 {
                assert!(crit.values().get(x, y) < 1e-24);
            }
        }
    }

    #[test]
    fn rejects_negative_values() {
        let bad = ImageGrid::filled(3, 3, -1.0).unwrap();
        assert!(CriterionField::new(bad).is_err());
        let ok = criterion_stationary(&random_image(3, 3, 1), 1.0, 0.0);
        assert!(ok.scaled(0.0).is_err());
    }
}
