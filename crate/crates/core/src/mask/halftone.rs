//! Density-based mask selection with error-diffusion halftoning.

use crate::error::Result;
use crate::image::{ImageGrid, Mask};
use crate::mask::select::check_budget;
use crate::mask::CriterionField;

/// How a criterion is turned into a pixel density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DensityMode {
    /// `d = lambda * crit`, clipped to `[0, 1]`.
    Direct,
    /// `d = mu` with `mu^2 / |1 - ln mu| = lambda * crit` (fat-pixel rule).
    #[default]
    SoftThreshold,
}

pub(crate) const MU_MIN: f64 = 1e-9;
pub(crate) const MU_MAX: f64 = 1.0 - 1e-9;
const MEAN_TOL: f64 = 1e-6;
const MAX_BISECTIONS: usize = 200;

/// `mu^2 / |1 - ln mu|`, increasing on `(0, 1)`.
pub fn soft_threshold_lhs(mu: f64) -> f64 {
    mu * mu / (1.0 - mu.ln()).abs()
}

/// Inverts [`soft_threshold_lhs`] on `[MU_MIN, MU_MAX]`.
///
/// Bisection on the bracket, accelerated by Newton steps that stay inside it.
pub fn soft_threshold_mu(t: f64) -> f64 {
    if t <= soft_threshold_lhs(MU_MIN) {
        return MU_MIN;
    }
    if t >= soft_threshold_lhs(MU_MAX) {
        return MU_MAX;
    }
    let (mut lo, mut hi) = (MU_MIN, MU_MAX);
    // sqrt(t) is exact when ln mu = 0 and a good start otherwise.
    let mut mu = t.sqrt().clamp(lo, hi);
    for _ in 0..100 {
        let l = 1.0 - mu.ln();
        let g = mu * mu / l - t;
        if g.abs() <= 1e-15 * t {
            break;
        }
        if g > 0.0 {
            hi = mu;
        } else {
            lo = mu;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let dg = mu * (2.0 * l + 1.0) / (l * l);
        let next = mu - g / dg;
        mu = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    mu
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Density map with mean `c` increasing with the criterion.
///
/// If less than a fraction `c` of the pixels have a positive criterion, those
/// pixels get density one and the remainder is spread evenly over the rest. An
/// identically zero criterion therefore yields the constant density `c`.
pub fn density_field(crit: &CriterionField, c: f64, mode: DensityMode) -> Result<ImageGrid> {
    let (w, h) = crit.shape();
    let n = w * h;
    check_budget(c, n)?;
    let values = crit.values().data();
    let positive = values.iter().filter(|&&v| v > 0.0).count();
    let frac = positive as f64 / n as f64;

    if frac <= c {
        let rest = if positive == n { 0.0 } else { (c - frac) / (1.0 - frac) };
        let data = values.iter().map(|&v| if v > 0.0 { 1.0 } else { rest }).collect();
        return ImageGrid::new(w, h, data);
    }

    let eval = |lambda: f64, out: &mut Vec<f64>| {
        out.clear();
        match mode {
            DensityMode::Direct => out.extend(values.iter().map(|v| (lambda * v).min(1.0))),
            DensityMode::SoftThreshold => {
                out.extend(values.iter().map(|v| soft_threshold_mu(lambda * v)))
            }
        }
        mean(out)
    };

    let mut buf = Vec::with_capacity(n);
    let scale = values.iter().sum::<f64>() / n as f64;
    let mut hi = c / scale;
    for _ in 0..1100 {
        if eval(hi, &mut buf) >= c {
            break;
        }
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let m = eval(mid, &mut buf);
        if (m - c).abs() <= MEAN_TOL {
            return ImageGrid::new(w, h, buf);
        }
        if m < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    eval(hi, &mut buf);
    ImageGrid::new(w, h, buf)
}

/// Serpentine Floyd-Steinberg binarization at threshold 1/2.
///
/// Even rows run left to right and odd rows right to left; the weights 7, 3,
/// 5 and 1 (over 16) are mirrored accordingly. At the image border the weights
/// of the neighbours that exist are rescaled to sum to one, so no error is
/// lost and the pixel count tracks the total density.
pub fn floyd_steinberg(density: &ImageGrid) -> Mask {
    let (w, h) = density.shape();
    let mut buf = density.data().to_vec();
    let mut bits = vec![false; w * h];
    let mut targets: Vec<(usize, f64)> = Vec::with_capacity(4);
    for y in 0..h {
        let forward = y % 2 == 0;
        for step in 0..w {
            let x = if forward { step } else { w - 1 - step };
            let i = y * w + x;
            let old = buf[i];
            let on = old >= 0.5;
            bits[i] = on;
            let err = old - if on { 1.0 } else { 0.0 };
            let ahead = if forward { Some(x + 1).filter(|&v| v < w) } else { x.checked_sub(1) };
            let behind = if forward { x.checked_sub(1) } else { Some(x + 1).filter(|&v| v < w) };
            targets.clear();
            if let Some(xa) = ahead {
                targets.push((y * w + xa, 7.0));
            }
            if y + 1 < h {
                let row = (y + 1) * w;
                if let Some(xb) = behind {
                    targets.push((row + xb, 3.0));
                }
                targets.push((row + x, 5.0));
                if let Some(xa) = ahead {
                    targets.push((row + xa, 1.0));
                }
            }
            let total: f64 = targets.iter().map(|t| t.1).sum();
            for &(j, wt) in &targets {
                buf[j] += err * wt / total;
            }
        }
    }
    Mask::from_bits(w, h, bits).expect("bit count matches shape")
}

/// Halftoned mask whose local density follows the criterion, about `c N` pixels.
pub fn halftone_mask(crit: &CriterionField, c: f64, mode: DensityMode) -> Result<Mask> {
    Ok(floyd_steinberg(&density_field(crit, c, mode)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn crit_from(img: ImageGrid) -> CriterionField {
        CriterionField::new(img).unwrap()
    }

    #[test]
    fn lhs_is_increasing() {
        let mut prev = 0.0;
        for k in 1..10_000 {
            let mu = k as f64 / 10_000.0;
            let v = soft_threshold_lhs(mu);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn mu_inverts_lhs() {
        for &mu in &[1e-6, 1e-3, 0.01, 0.1, 0.37, 0.5, 0.9, 0.999] {
            let back = soft_threshold_mu(soft_threshold_lhs(mu));
            assert!((back - mu).abs() < 1e-12 * mu.max(1e-3), "{mu} -> {back}");
        }
        assert_eq!(soft_threshold_mu(0.0), MU_MIN);
        assert_eq!(soft_threshold_mu(5.0), MU_MAX);
    }

    #[test]
    fn constant_criterion_halves() {
        for crit in [ImageGrid::filled(128, 128, 3.0).unwrap(), ImageGrid::zeros(128, 128).unwrap()] {
            let crit = crit_from(crit);
            for mode in [DensityMode::Direct, DensityMode::SoftThreshold] {
                let d = density_field(&crit, 0.5, mode).unwrap();
                assert!(d.data().iter().all(|v| (v - 0.5).abs() < 1e-6));
                let m = halftone_mask(&crit, 0.5, mode).unwrap();
                assert!((8028..=8356).contains(&m.count()), "{}", m.count());
            }
        }
    }

    #[test]
    fn constant_density_gray_preserved() {
        for &c in &[0.05, 0.1, 0.25, 0.5, 0.8] {
            let d = ImageGrid::filled(64, 48, c).unwrap();
            let m = floyd_steinberg(&d);
            let measured = m.count() as f64 / m.len() as f64;
            assert!((measured - c).abs() <= 2.0 / (m.len() as f64).sqrt());
        }
    }

    #[test]
    fn two_region_direct() {
        let crit = crit_from(ImageGrid::from_fn(64, 64, |x, _| if x < 32 { 0.0 } else { 1.0 }).unwrap());
        let d = density_field(&crit, 0.25, DensityMode::Direct).unwrap();
        assert!((0..64).all(|y| (0..32).all(|x| d.get(x, y) == 0.0)));
        let m = halftone_mask(&crit, 0.25, DensityMode::Direct).unwrap();
        assert!(m.indices().all(|i| i % 64 >= 32));
        let target = 0.25 * 4096.0;
        assert!((m.count() as f64 - target).abs() <= 0.02 * target);
    }

    #[test]
    fn sparse_support_saturates() {
        let crit = crit_from(ImageGrid::from_fn(10, 10, |x, y| if x == 0 && y < 5 { 1.0 } else { 0.0 }).unwrap());
        let d = density_field(&crit, 0.2, DensityMode::SoftThreshold).unwrap();
        assert_eq!(d.get(0, 0), 1.0);
        assert!((d.mean() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn random_criteria_meet_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let img = ImageGrid::from_fn(96, 80, |_, _| rng.gen::<f64>().powi(4)).unwrap();
        let crit = crit_from(img);
        for mode in [DensityMode::Direct, DensityMode::SoftThreshold] {
            for &c in &[0.05, 0.1, 0.25] {
                let d = density_field(&crit, c, mode).unwrap();
                assert!((d.mean() - c).abs() <= 1e-6);
                assert!(d.data().iter().all(|v| (0.0..=1.0).contains(v)));
                let m = floyd_steinberg(&d);
                let target = c * m.len() as f64;
                assert!((m.count() as f64 - target).abs() <= 0.02 * target, "{mode:?} {c} {}", m.count());
            }
        }
    }

    #[test]
    fn density_is_monotone_in_criterion() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let crit = crit_from(ImageGrid::from_fn(20, 20, |_, _| rng.gen::<f64>()).unwrap());
        let d = density_field(&crit, 0.3, DensityMode::SoftThreshold).unwrap();
        let v = crit.values().data();
        for i in 0..400 {
            for j in 0..400 {
                if v[i] < v[j] {
                    assert!(d.data()[i] <= d.data()[j]);
                }
            }
        }
    }
}
