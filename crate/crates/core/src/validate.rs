//! Tolerance checks over the asymptotics experiments.
//!
//! Each suite runs its experiments, compares the measurements with fixed
//! tolerances and keeps the raw tables for CSV export.
#![allow(clippy::excessive_precision)]

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::asymptotics::{
    annulus_check, bessel_i0, bessel_i0_k0, bessel_i1, bessel_k0, bessel_k1, disc_closed_form_error,
    epsilon_sweep_topograd, linear_fit, log_spaced, solve_disc_radial, theta_experiment, verify_homogeneous_disc,
    QuadraticSource, ThetaRow, EULER_GAMMA,
};
use crate::bench::write_rows;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Topograd,
    Bessel,
    Disc,
    Theta,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Topograd => "topograd",
            Suite::Bessel => "bessel",
            Suite::Disc => "disc",
            Suite::Theta => "theta",
            Suite::All => "all",
        }
    }

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Topograd, Suite::Bessel, Suite::Disc, Suite::Theta],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::Topograd, Suite::Bessel, Suite::Disc, Suite::Theta, Suite::All]
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub limit: String,
    pub pass: bool,
}

impl Check {
    fn new(suite: Suite, name: impl Into<String>, value: f64, limit: impl Into<String>, pass: bool) -> Self {
        Self {
            suite: suite.name(),
            name: name.into(),
            value,
            limit: limit.into(),
            pass,
        }
    }

    fn below(suite: Suite, name: impl Into<String>, value: f64, max: f64) -> Self {
        Self::new(suite, name, value, format!("< {max:e}"), value < max)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{status} {}/{}: {:.6e} ({})", self.suite, self.name, self.value, self.limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub theta_resolution: usize,
    pub theta_alpha: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            theta_resolution: 512,
            theta_alpha: 10.0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    /// `(file name, CSV bytes)` of the raw measurements.
    pub tables: Vec<(String, Vec<u8>)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn checks_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_rows(&self.checks, &mut buf)?;
        Ok(buf)
    }

    fn table<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut buf = Vec::new();
        write_rows(rows, &mut buf)?;
        self.tables.push((name.to_string(), buf));
        Ok(())
    }
}

pub fn run(suite: Suite, opts: &ValidateOptions) -> Result<Report> {
    let mut report = Report::default();
    for part in suite.parts() {
        match part {
            Suite::Topograd => topograd(&mut report)?,
            Suite::Bessel => bessel(&mut report)?,
            Suite::Disc => disc(&mut report)?,
            Suite::Theta => theta(&mut report, opts)?,
            Suite::All => unreachable!("expanded by parts"),
        }
    }
    Ok(report)
}

/// Source used by the sweep: `f(x0) - Lap f(x0) = 1` at `alpha = 1`.
pub fn sweep_source() -> QuadraticSource {
    QuadraticSource {
        c: 0.6,
        cxx: -0.3,
        cyy: 0.1,
        ..Default::default()
    }
}

fn topograd(report: &mut Report) -> Result<()> {
    let s = Suite::Topograd;
    let alpha = 1.0;
    let sweep = epsilon_sweep_topograd(&sweep_source(), alpha, &log_spaced(1e-2, 1e-3, 4))?;
    report.checks.push(Check::new(
        s,
        "loglog_slope",
        sweep.slope,
        "in [3.7, 4.3]",
        (3.7..=4.3).contains(&sweep.slope),
    ));
    let ratio = sweep.ratio();
    report.checks.push(Check::new(
        s,
        "coefficient_ratio",
        ratio,
        "|ratio - 1| <= 0.15",
        (ratio - 1.0).abs() <= 0.15,
    ));

    // f - alpha Lap f = 0 at x0.
    let flat = QuadraticSource {
        c: 0.4,
        cxx: 0.1,
        cyy: 0.1,
        ..Default::default()
    };
    let degenerate = epsilon_sweep_topograd(&flat, alpha, &log_spaced(1e-2, 1e-3, 4))?;
    let bound = 0.05 * sweep.reference;
    report.checks.push(Check::new(
        s,
        "vanishing_coefficient",
        degenerate.coefficient.abs(),
        format!("< {bound:e}"),
        degenerate.coefficient.abs() < bound,
    ));
    report.table("topograd.csv", &sweep.rows)
}

#[derive(Debug, Clone, Copy, Serialize)]
struct BesselRow {
    z: f64,
    i0: f64,
    i1: f64,
    k0: f64,
    k1: f64,
}

/// `(z, I0, K0)` to 20 significant digits.
const BESSEL_REFERENCE: [(f64, f64, f64); 5] = [
    (0.01, 1.000025000156250434, 4.7212447301610949651),
    (0.5, 1.0634833707413235193, 0.92441907122766586178),
    (2.0, 2.2795853023360672674, 0.11389387274953343565),
    (5.0, 27.239871823604446895, 0.0036910983340425942747),
    (20.0, 43558282.559553533272, 5.7412378153365242927e-10),
];

fn bessel(report: &mut Report) -> Result<()> {
    let s = Suite::Bessel;
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    report.checks.push(Check::new(s, "i0_at_zero", bessel_i0(0.0), "= 1", bessel_i0(0.0) == 1.0));

    let worst = BESSEL_REFERENCE
        .iter()
        .map(|&(z, i0, k0)| {
            let (a, b) = bessel_i0_k0(z);
            rel(a, i0).max(rel(b, k0))
        })
        .fold(0.0, f64::max);
    report.checks.push(Check::below(s, "reference_values", worst, 1e-10));

    for z in [1.0, 2.0, 4.0] {
        let w = bessel_i0(z) * bessel_k1(z) + bessel_i1(z) * bessel_k0(z);
        report.checks.push(Check::below(s, format!("wronskian_z{z}"), (w * z - 1.0).abs(), 1e-10));
    }

    let z: f64 = 0.01;
    let law = -z.ln() + 2f64.ln() - EULER_GAMMA;
    report.checks.push(Check::below(s, "k0_small_z_law", rel(law, bessel_k0(z)), 1e-4));

    let rows: Vec<BesselRow> = log_spaced(50.0, 1e-3, 61)
        .into_iter()
        .rev()
        .map(|z| BesselRow {
            z,
            i0: bessel_i0(z),
            i1: bessel_i1(z),
            k0: bessel_k0(z),
            k1: bessel_k1(z),
        })
        .collect();
    let positive = rows
        .iter()
        .all(|r| [r.i0, r.i1, r.k0, r.k1].iter().all(|v| v.is_finite() && *v > 0.0));
    report
        .checks
        .push(Check::new(s, "finite_positive", rows.len() as f64, "all > 0", positive));
    report.table("bessel.csv", &rows)
}

fn disc(report: &mut Report) -> Result<()> {
    let s = Suite::Disc;
    let (eps, alpha, g0) = (0.1, 1.0, 1.0);
    let grid = solve_disc_radial(eps, alpha, g0)?;
    report
        .checks
        .push(Check::below(s, "closed_form_rel_error", disc_closed_form_error(&grid, alpha, g0), 1e-6));
    report.checks.push(Check::below(s, "fd_residual", grid.residual, 1e-10));

    let stiff = solve_disc_radial(eps, 1e6, g0)?;
    let sup = stiff.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    report.checks.push(Check::below(s, "large_alpha_sup", sup, 1e-4 * g0 * eps * eps));

    let hom = verify_homogeneous_disc(0.2, 1.0)?;
    report.checks.push(Check::below(s, "homogeneous_residual", hom.max_residual, 1e-6));
    report
        .checks
        .push(Check::below(s, "homogeneous_boundary", hom.boundary_value.abs(), 1e-12));
    report.checks.push(Check::new(
        s,
        "homogeneous_log_ratio",
        hom.small_r_ratio,
        "|ratio - 1| <= 0.05",
        (hom.small_r_ratio - 1.0).abs() <= 0.05,
    ));
    report.table("disc.csv", &[hom])
}

fn theta(report: &mut Report, opts: &ValidateOptions) -> Result<()> {
    let s = Suite::Theta;
    let ms = [0.05, 0.1, 0.2, 0.3];
    let rows = theta_experiment(&ms, &[1, 2], opts.theta_alpha, opts.theta_resolution)?;
    let by_k = |k: usize| -> Vec<&ThetaRow> { rows.iter().filter(|r| r.k == k).collect() };
    let (k1, k2) = (by_k(1), by_k(2));

    let x: Vec<f64> = k1.iter().map(|r| r.m.ln().abs()).collect();
    let y: Vec<f64> = k1.iter().map(|r| r.energy).collect();
    let (_, _, r2) = linear_fit(&x, &y);
    report.checks.push(Check::new(s, "log_fit_r2", r2, "> 0.95", r2 > 0.95));

    let spread = k1
        .iter()
        .zip(&k2)
        .map(|(a, b)| ((a.energy - b.energy) / a.energy).abs())
        .fold(0.0, f64::max);
    report.checks.push(Check::below(s, "k1_k2_spread", spread, 0.1));

    let monotone = [&k1, &k2]
        .iter()
        .all(|rs| rs.windows(2).all(|p| p[1].energy <= p[0].energy));
    report
        .checks
        .push(Check::new(s, "monotone_in_m", rows.len() as f64, "non-increasing", monotone));

    let mut worst: f64 = 0.0;
    for m in [0.05, 0.1, 0.3] {
        worst = worst.max(annulus_check(m, FRAC_1_SQRT_2, 2.0, 20_000)?.rel_error_k);
    }
    report.checks.push(Check::below(s, "annulus_rel_error", worst, 1e-4));
    report.table("theta.csv", &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        for suite in [Suite::Bessel, Suite::Disc] {
            let r = run(suite, &ValidateOptions::default()).unwrap();
            for c in &r.checks {
                assert!(c.pass, "{c}");
            }
            assert_eq!(r.tables.len(), 1);
        }
    }

    #[test]
    fn suite_names_parse() {
        for s in [Suite::Topograd, Suite::Bessel, Suite::Disc, Suite::Theta, Suite::All] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn checks_csv_has_header() {
        let r = run(Suite::Bessel, &ValidateOptions::default()).unwrap();
        let csv = String::from_utf8(r.checks_csv().unwrap()).unwrap();
        assert!(csv.starts_with("suite,name,value,limit,pass\n"));
    }
}
