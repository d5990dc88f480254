//! Energy of periodic lattices of Dirichlet balls on the unit square.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::{ImageGrid, Mask};
use crate::solver::{solve_linear, LinearOperatorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaRow {
    /// Ball radius relative to the lattice cell side.
    pub m: f64,
    /// Balls per side; the lattice has `n = k^2` balls of radius `m / k`.
    pub k: usize,
    pub n: usize,
    pub resolution: usize,
    /// Pixels inside the balls.
    pub mask_pixels: usize,
    /// `n * sum(v) h^2`.
    pub energy: f64,
    pub cg_iterations: usize,
}

/// Ball lattice mask: pixel centres within `m / k` of a cell centre.
pub fn lattice_mask(resolution: usize, m: f64, k: usize) -> Mask {
    let h = 1.0 / resolution as f64;
    let radius = m / k as f64;
    let cell = 1.0 / k as f64;
    let mut mask = Mask::empty(resolution, resolution);
    for y in 0..resolution {
        for x in 0..resolution {
            let (px, py) = ((x as f64 + 0.5) * h, (y as f64 + 0.5) * h);
            let cx = ((px / cell).floor().min(k as f64 - 1.0) + 0.5) * cell;
            let cy = ((py / cell).floor().min(k as f64 - 1.0) + 0.5) * cell;
            if (px - cx).powi(2) + (py - cy).powi(2) <= radius * radius {
                mask.insert(y * resolution + x);
            }
        }
    }
    mask
}

/// Solves `-alpha Lap v + v = 1` on the unit square (Neumann outside),
/// `v = 0` on the ball lattice, and returns `n * int v`.
pub fn theta_cell(m: f64, k: usize, alpha: f64, resolution: usize) -> Result<ThetaRow> {
    if !(m > 0.0 && m < std::f64::consts::FRAC_1_SQRT_2) || k == 0 || alpha.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidParameter(format!(
            "theta cell needs 0 < m < 1/sqrt(2), k >= 1, alpha > 0; got m={m}, k={k}, alpha={alpha}"
        )));
    }
    let mask = lattice_mask(resolution, m, k);
    if mask.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "balls of radius {m}/{k} contain no pixel at resolution {resolution}"
        )));
    }
    let h = 1.0 / resolution as f64;
    let ones = ImageGrid::filled(resolution, resolution, 1.0)?;
    let zeros = ImageGrid::zeros(resolution, resolution)?;
    let op = LinearOperatorSpec {
        reaction: 1.0,
        coeff: alpha / (h * h),
        dirichlet: &mask,
        rhs: &ones,
        dirichlet_values: &zeros,
        initial: None,
    };
    let (v, report) = solve_linear(&op, 1e-10, Some(50 * resolution + 1000))?;
    let n = k * k;
    Ok(ThetaRow {
        m,
        k,
        n,
        resolution,
        mask_pixels: mask.count(),
        energy: n as f64 * v.data().iter().sum::<f64>() * h * h,
        cg_iterations: report.iterations,
    })
}

/// Every `(m, k)` combination, in the order `ms` outer, `ks` inner.
pub fn theta_experiment(ms: &[f64], ks: &[usize], alpha: f64, resolution: usize) -> Result<Vec<ThetaRow>> {
    let cells: Vec<(f64, usize)> = ms.iter().flat_map(|&m| ks.iter().map(move |&k| (m, k))).collect();
    cells
        .par_iter()
        .map(|&(m, k)| theta_cell(m, k, alpha, resolution))
        .collect()
}

/// Least-squares line `y = a + b x` and its coefficient of determination.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (intercept, slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_geometry() {
        let one = lattice_mask(64, 0.25, 1);
        let four = lattice_mask(64, 0.25, 2);
        // Same covered fraction up to pixelization.
        let (a, b) = (one.count() as f64, four.count() as f64);
        assert!((a - b).abs() / a < 0.05);
        assert!(one.contains_xy(32, 32));
        assert!(!one.contains_xy(0, 0));
        assert!(four.contains_xy(16, 16) && four.contains_xy(48, 48));
    }

    #[test]
    fn energy_decreases_with_radius() {
        let rows = theta_experiment(&[0.1, 0.2, 0.4, 0.6], &[1], 10.0, 64).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].energy < pair[0].energy);
        }
        assert!(rows[3].energy > 0.0 && rows[3].energy < 0.01 * rows[0].energy);
    }

    #[test]
    fn fit_of_exact_line() {
        let x = [1.0, 2.0, 3.0];
        let y = [3.0, 5.0, 7.0];
        let (a, b, r2) = linear_fit(&x, &y);
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_cells() {
        assert!(theta_cell(0.0, 1, 1.0, 32).is_err());
        assert!(theta_cell(0.1, 0, 1.0, 32).is_err());
        assert!(theta_cell(0.001, 1, 1.0, 16).is_err());
    }
}
