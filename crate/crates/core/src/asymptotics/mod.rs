//! Numerical checks of the asymptotic results behind the mask criteria:
//! special functions, radial disc solutions, the small-ball expansion of the
//! cost and the energy of ball lattices.

mod bessel;
mod radial;
mod theta;

use serde::Serialize;

pub use bessel::{bessel_i0, bessel_i0_k0, bessel_i1, bessel_k0, bessel_k1, EULER_GAMMA};
pub use radial::{
    annulus_check, annulus_closed_form, default_nodes, disc_closed_form, disc_closed_form_error,
    homogeneous_disc_solution, solve_disc_radial, solve_disc_radial_with, verify_homogeneous_disc,
    AnnulusReport, HomogeneousDiscReport, RadialGrid,
};
pub use theta::{lattice_mask, linear_fit, theta_cell, theta_experiment, ThetaRow};

use crate::error::{Error, Result};

/// `f(x, y) = c + cx x + cy y + cxx x^2 + cyy y^2 + cxy x y` around `x0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadraticSource {
    pub c: f64,
    pub cx: f64,
    pub cy: f64,
    pub cxx: f64,
    pub cyy: f64,
    pub cxy: f64,
}

impl QuadraticSource {
    pub fn value_at_origin(&self) -> f64 {
        self.c
    }

    pub fn laplacian(&self) -> f64 {
        2.0 * (self.cxx + self.cyy)
    }

    /// `f(x0) - alpha Lap f(x0)`.
    pub fn filtered(&self, alpha: f64) -> f64 {
        self.c - alpha * self.laplacian()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsSweepRow {
    pub epsilon: f64,
    /// `int_B w` with `w = u_eps - f`.
    pub integral: f64,
    /// `1/2 int_B (u_eps - f)(f - alpha Lap f)`.
    pub j_difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsSweepResult {
    pub alpha: f64,
    pub rows: Vec<EpsSweepRow>,
    /// Least-squares `A` in `j ~ A eps^4 ln eps` over the two smallest radii.
    pub coefficient: f64,
    /// `(f(x0) - alpha Lap f(x0))^2 pi`.
    pub reference: f64,
    /// Relative residual of the one-term fit.
    pub fit_residual: f64,
    /// Slope of `ln |j|` against `ln eps` over all radii with `j != 0`.
    pub slope: f64,
}

impl EpsSweepResult {
    pub fn epsilons(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.epsilon).collect()
    }

    /// `coefficient / reference`; NaN when the reference vanishes.
    pub fn ratio(&self) -> f64 {
        self.coefficient / self.reference
    }

    /// Fit residual above 10% flags radii outside the asymptotic regime.
    pub fn in_asymptotic_regime(&self) -> bool {
        self.fit_residual <= 0.1
    }
}

/// Small-ball expansion of the stationary cost.
///
/// For each `eps` the disc problem `w - alpha Lap w = g` with `w = 0` on the
/// circle is solved with the source frozen at `g = -f(x0) + alpha Lap f(x0)`.
pub fn epsilon_sweep_topograd(f: &QuadraticSource, alpha: f64, epsilons: &[f64]) -> Result<EpsSweepResult> {
    if epsilons.len() < 2 {
        return Err(Error::InvalidParameter("need at least two radii".into()));
    }
    if epsilons.windows(2).any(|p| p[1] >= p[0]) || epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::InvalidParameter(
            "radii must be strictly decreasing and lie in (0, 1)".into(),
        ));
    }
    let filtered = f.filtered(alpha);
    let g = -filtered;
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let grid = solve_disc_radial(eps, alpha, g)?;
        let integral = grid.integral();
        rows.push(EpsSweepRow {
            epsilon: eps,
            integral,
            j_difference: 0.5 * integral * filtered,
        });
    }

    let basis = |e: f64| e.powi(4) * e.ln();
    let tail = &rows[rows.len() - 2..];
    let num: f64 = tail.iter().map(|r| r.j_difference * basis(r.epsilon)).sum();
    let den: f64 = tail.iter().map(|r| basis(r.epsilon).powi(2)).sum();
    let coefficient = num / den;
    let res: f64 = tail
        .iter()
        .map(|r| (r.j_difference - coefficient * basis(r.epsilon)).powi(2))
        .sum::<f64>()
        .sqrt();
    let size: f64 = tail.iter().map(|r| r.j_difference.powi(2)).sum::<f64>().sqrt();
    let fit_residual = if size == 0.0 { 0.0 } else { res / size };

    let (lx, ly): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.j_difference != 0.0)
        .map(|r| (r.epsilon.ln(), r.j_difference.abs().ln()))
        .unzip();
    let slope = if lx.len() >= 2 { linear_fit(&lx, &ly).1 } else { f64::NAN };

    Ok(EpsSweepResult {
        alpha,
        rows,
        coefficient,
        reference: filtered * filtered * std::f64::consts::PI,
        fit_residual,
        slope,
    })
}

/// Log-spaced radii from `hi` down to `lo`.
pub fn log_spaced(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && hi > lo && lo > 0.0);
    let (a, b) = (hi.ln(), lo.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source() -> QuadraticSource {
        QuadraticSource {
            c: 0.6,
            cx: 0.2,
            cxx: -0.3,
            cyy: 0.1,
            ..Default::default()
        }
    }

    #[test]
    fn vanishing_leading_coefficient() {
        // f(x0) = alpha Lap f(x0) makes the frozen source vanish.
        let f = QuadraticSource {
            c: 0.8,
            cxx: 0.2,
            cyy: 0.2,
            ..Default::default()
        };
        let sweep = epsilon_sweep_topograd(&f, 1.0, &log_spaced(1e-2, 1e-3, 4)).unwrap();
        assert_eq!(f.filtered(1.0), 0.0);
        assert_eq!(sweep.coefficient, 0.0);
        assert!(sweep.rows.iter().all(|r| r.j_difference == 0.0));
    }

    #[test]
    fn quartic_scaling() {
        let sweep = epsilon_sweep_topograd(&source(), 1.0, &log_spaced(1e-2, 1e-3, 5)).unwrap();
        assert!((sweep.slope - 4.0).abs() < 0.01, "{}", sweep.slope);
        for r in &sweep.rows {
            // j = -(f - alpha Lap f)^2 pi eps^4 / (16 alpha) to leading order.
            let lead = -sweep.reference * r.epsilon.powi(4) / 16.0;
            assert!(((r.j_difference - lead) / lead).abs() < 1e-3);
        }
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(epsilon_sweep_topograd(&source(), 1.0, &[1e-3, 1e-2]).is_err());
        assert!(epsilon_sweep_topograd(&source(), 1.0, &[1e-2]).is_err());
    }
}
