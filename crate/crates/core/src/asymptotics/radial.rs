//! Radially symmetric solutions on discs and annuli.

use std::f64::consts::PI;

use serde::Serialize;

use crate::asymptotics::bessel::{bessel_i0, bessel_k0};
use crate::error::{Error, Result};

pub const MIN_NODES: usize = 64;
const MAX_NODES: usize = 200_000;

/// Samples `w(r_i)` at `r_i = i eps / nr`, `i = 0..=nr`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub epsilon: f64,
    pub nr: usize,
    pub values: Vec<f64>,
    /// Max-norm residual of the discrete equations, relative to the data scale.
    pub residual: f64,
}

impl RadialGrid {
    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.epsilon / self.nr as f64
    }

    /// `2 pi int_0^eps w(r) r dr` by the composite Simpson rule.
    pub fn integral(&self) -> f64 {
        let h = self.epsilon / self.nr as f64;
        let f = |i: usize| self.values[i] * self.radius(i);
        let mut acc = f(0) + f(self.nr);
        for i in 1..self.nr {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
        }
        2.0 * PI * acc * h / 3.0
    }
}

/// Default radial resolution: `max(256, 0.64 / eps)` rounded up to even, capped at 2e5.
pub fn default_nodes(eps: f64) -> usize {
    let n = (0.64 / eps).ceil().clamp(256.0, MAX_NODES as f64) as usize;
    n + n % 2
}

/// Thomas algorithm; `lower[0]` and `upper[n-1]` are ignored.
pub(crate) fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// `w - alpha (w'' + w'/r) = g0` on `[0, eps)`, `w'(0) = 0`, `w(eps) = 0`,
/// by second-order finite differences at [`default_nodes`] resolution.
pub fn solve_disc_radial(eps: f64, alpha: f64, g0: f64) -> Result<RadialGrid> {
    solve_disc_radial_with(eps, alpha, g0, default_nodes(eps))
}

pub fn solve_disc_radial_with(eps: f64, alpha: f64, g0: f64, nr: usize) -> Result<RadialGrid> {
    if !(eps > 0.0 && eps.is_finite() && alpha > 0.0 && alpha.is_finite() && g0.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "disc problem needs eps > 0, alpha > 0 and finite g0; got {eps}, {alpha}, {g0}"
        )));
    }
    if !(MIN_NODES..=MAX_NODES).contains(&nr) || nr % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "radial nodes must be even and in [{MIN_NODES}, {MAX_NODES}], got {nr}"
        )));
    }
    let h = eps / nr as f64;
    let s = alpha / (h * h);
    let (mut lower, mut diag, mut upper) = (vec![0.0; nr], vec![0.0; nr], vec![0.0; nr]);
    // At r = 0 the operator w'' + w'/r becomes 2 w'' = 4 (w_1 - w_0) / h^2.
    diag[0] = 1.0 + 4.0 * s;
    upper[0] = -4.0 * s;
    for i in 1..nr {
        let half = 0.5 / i as f64;
        lower[i] = -s * (1.0 - half);
        diag[i] = 1.0 + 2.0 * s;
        upper[i] = -s * (1.0 + half);
    }
    let rhs = vec![g0; nr];
    let mut values = solve_tridiagonal(&lower, &diag, &upper, &rhs);
    values.push(0.0);

    let mut worst: f64 = 0.0;
    for i in 0..nr {
        let mut row = diag[i] * values[i] + upper[i] * values[i + 1];
        if i > 0 {
            row += lower[i] * values[i - 1];
        }
        worst = worst.max((row - g0).abs());
    }
    let scale = g0.abs().max(f64::MIN_POSITIVE);
    let residual = if g0 == 0.0 { worst } else { worst / scale };
    Ok(RadialGrid {
        epsilon: eps,
        nr,
        values,
        residual,
    })
}

/// Closed form `g0 (1 - I0(r / sqrt(alpha)) / I0(eps / sqrt(alpha)))` of the disc problem.
pub fn disc_closed_form(r: f64, eps: f64, alpha: f64, g0: f64) -> f64 {
    let s = alpha.sqrt();
    g0 * (1.0 - bessel_i0(r / s) / bessel_i0(eps / s))
}

/// `max |w_fd - w_exact| / max |w_exact|` over the grid nodes.
pub fn disc_closed_form_error(grid: &RadialGrid, alpha: f64, g0: f64) -> f64 {
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (i, &w) in grid.values.iter().enumerate() {
        let exact = disc_closed_form(grid.radius(i), grid.epsilon, alpha, g0);
        err = err.max((w - exact).abs());
        scale = scale.max(exact.abs());
    }
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}

/// `(K0(r/s) - K0(eps/s) I0(r/s) / I0(eps/s)) / (2 pi)` with `s = sqrt(dt)`:
/// solves `w - dt Lap w = 0` in the punctured disc with `w(eps) = 0` and a
/// logarithmic singularity at the centre.
pub fn homogeneous_disc_solution(r: f64, eps: f64, dt: f64) -> f64 {
    let s = dt.sqrt();
    let ratio = bessel_k0(eps / s) / bessel_i0(eps / s);
    (bessel_k0(r / s) - ratio * bessel_i0(r / s)) / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomogeneousDiscReport {
    pub epsilon: f64,
    pub dt: f64,
    /// Max of `|w - dt (w'' + w'/r)|` over `r` in `[eps/100, eps (1 - 1e-6)]`.
    pub max_residual: f64,
    pub boundary_value: f64,
    /// `w(eps 1e-3) / ((1/2pi) ln 1e3)`.
    pub small_r_ratio: f64,
}

/// Eight-order central second derivative weights for offsets 0..=4.
const D2_WEIGHTS: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

/// Checks [`homogeneous_disc_solution`] against its ODE.
///
/// Derivatives are taken in `s = ln r`, where `w'' + w'/r = w_ss / r^2` and
/// the logarithmic part of `w` is linear.
pub fn verify_homogeneous_disc(eps: f64, dt: f64) -> Result<HomogeneousDiscReport> {
    if !(eps > 0.0 && dt > 0.0 && eps.is_finite() && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("need eps > 0 and dt > 0, got {eps}, {dt}")));
    }
    let w = |s: f64| homogeneous_disc_solution(s.exp(), eps, dt);
    let hs = 0.1;
    let (a, b) = ((eps / 100.0).ln(), (eps * (1.0 - 1e-6)).ln());
    let samples = 400;
    let mut max_residual: f64 = 0.0;
    for j in 0..=samples {
        let s = a + (b - a) * j as f64 / samples as f64;
        let mut w_ss = D2_WEIGHTS[0] * w(s);
        for (k, c) in D2_WEIGHTS.iter().enumerate().skip(1) {
            let off = k as f64 * hs;
            w_ss += c * (w(s + off) + w(s - off));
        }
        w_ss /= hs * hs;
        let r = s.exp();
        max_residual = max_residual.max((w(s) - dt * w_ss / (r * r)).abs());
    }
    let small = homogeneous_disc_solution(eps * 1e-3, eps, dt) / (1e3f64.ln() / (2.0 * PI));
    Ok(HomogeneousDiscReport {
        epsilon: eps,
        dt,
        max_residual,
        boundary_value: homogeneous_disc_solution(eps, eps, dt),
        small_r_ratio: small,
    })
}

/// Comparison of the annulus closed form with a numerical solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusReport {
    pub m: f64,
    pub t1: f64,
    pub alpha: f64,
    /// Error with `k = t1^2 / (2 alpha)`.
    pub rel_error_k: f64,
    /// Error with the alternative `k = m t1^2 / (2 alpha)`.
    pub rel_error_mk: f64,
}

/// `k ln(r/m) - (r^2 - m^2) / (4 alpha)`.
pub fn annulus_closed_form(r: f64, m: f64, alpha: f64, k: f64) -> f64 {
    k * (r / m).ln() - (r * r - m * m) / (4.0 * alpha)
}

/// Solves `-alpha (w'' + w'/r) = 1` on `[m, t1]`, `w(m) = 0`, `w'(t1) = 0`
/// with `n` intervals and compares both candidate constants.
pub fn annulus_check(m: f64, t1: f64, alpha: f64, n: usize) -> Result<AnnulusReport> {
    if !(m > 0.0 && t1 > m && alpha > 0.0) || n < 8 {
        return Err(Error::InvalidParameter(format!(
            "annulus needs 0 < m < t1, alpha > 0, n >= 8; got m={m}, t1={t1}, alpha={alpha}, n={n}"
        )));
    }
    let h = (t1 - m) / n as f64;
    let s = alpha / (h * h);
    // Unknowns w_1..w_n; w_0 = 0, ghost w_{n+1} = w_{n-1}.
    let (mut lower, mut diag, mut upper) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for j in 0..n {
        let i = j + 1;
        let r = m + i as f64 * h;
        let half = h / (2.0 * r);
        diag[j] = 2.0 * s;
        if i < n {
            lower[j] = -s * (1.0 - half);
            upper[j] = -s * (1.0 + half);
        } else {
            lower[j] = -2.0 * s;
        }
    }
    let w = solve_tridiagonal(&lower, &diag, &upper, &vec![1.0; n]);
    let err = |k: f64| {
        let mut e: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (j, &v) in w.iter().enumerate() {
            let exact = annulus_closed_form(m + (j + 1) as f64 * h, m, alpha, k);
            e = e.max((v - exact).abs());
            scale = scale.max(exact.abs());
        }
        e / scale
    };
    Ok(AnnulusReport {
        m,
        t1,
        alpha,
        rel_error_k: err(t1 * t1 / (2.0 * alpha)),
        rel_error_mk: err(m * t1 * t1 / (2.0 * alpha)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_source() {
        let g = solve_disc_radial(0.1, 1.0, 0.0).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_bessel_closed_form() {
        let g = solve_disc_radial(0.1, 1.0, 1.0).unwrap();
        assert!(g.residual < 1e-10);
        assert!(disc_closed_form_error(&g, 1.0, 1.0) < 1e-6);
        assert_eq!(*g.values.last().unwrap(), 0.0);
    }

    #[test]
    fn stiff_limit_vanishes() {
        let eps: f64 = 0.1;
        let g = solve_disc_radial(eps, 1e6, 1.0).unwrap();
        let max = g.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(max < 1e-4 * eps * eps);
    }

    #[test]
    fn integral_of_closed_form() {
        // For small eps, int w = g pi eps^4 / (8 alpha) (1 + O(eps^2 / alpha)).
        let (eps, alpha) = (0.01, 2.0);
        let g = solve_disc_radial(eps, alpha, 1.0).unwrap();
        let expected = PI * eps.powi(4) / (8.0 * alpha);
        assert!(((g.integral() - expected) / expected).abs() < 1e-4);
    }

    #[test]
    fn resolution_rule() {
        assert_eq!(default_nodes(0.1), 256);
        assert_eq!(default_nodes(1e-3), 640);
        assert_eq!(default_nodes(1e-9), 200_000);
        assert!(solve_disc_radial_with(0.1, 1.0, 1.0, 10).is_err());
        assert!(solve_disc_radial(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn homogeneous_solution_properties() {
        let rep = verify_homogeneous_disc(0.2, 1.0).unwrap();
        assert!(rep.boundary_value.abs() < 1e-12);
        assert!(rep.max_residual < 1e-6, "{}", rep.max_residual);
        assert!((rep.small_r_ratio - 1.0).abs() < 0.05);
    }

    #[test]
    fn annulus_constant() {
        let t1 = std::f64::consts::FRAC_1_SQRT_2;
        for &m in &[0.05, 0.1, 0.3] {
            let rep = annulus_check(m, t1, 2.0, 20_000).unwrap();
            assert!(rep.rel_error_k < 1e-4, "{rep:?}");
            assert!(rep.rel_error_mk > 1e-2, "{rep:?}");
        }
    }
}
