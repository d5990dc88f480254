//! Modified Bessel functions of order 0 and 1 for real `z > 0`.
//!
//! * `I_0`, `I_1`: ascending power series for `z <= 30` (all terms positive,
//!   so no cancellation), the large-argument expansion beyond.
//! * `K_0`, `K_1`: the logarithmic series for `z <= 2`, the integral
//!   `K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt` by the trapezoidal
//!   rule (exponentially convergent for this analytic integrand) for
//!   `2 < z <= 25`, and the large-argument expansion beyond.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_I_MAX: f64 = 30.0;
const SERIES_K_MAX: f64 = 2.0;
const QUADRATURE_K_MAX: f64 = 25.0;

/// `sum_k a_k(nu) / z^k` with `a_k = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k)`,
/// alternating in sign for `I` (`sign = -1`) and not for `K` (`sign = +1`).
fn large_argument_series(nu: f64, z: f64, sign: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * z) * sign;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn i_series(order: u32, z: f64) -> f64 {
    let q = 0.25 * z * z;
    // k = 0 term: (z/2)^order / order!
    let mut term = if order == 0 { 1.0 } else { 0.5 * z };
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + order as f64));
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
    }
}

pub fn bessel_i0(z: f64) -> f64 {
    let z = z.abs();
    if z <= SERIES_I_MAX {
        i_series(0, z)
    } else {
        i_large(0.0, z)
    }
}

pub fn bessel_i1(z: f64) -> f64 {
    let s = z.signum();
    let z = z.abs();
    s * if z <= SERIES_I_MAX {
        i_series(1, z)
    } else {
        i_large(1.0, z)
    }
}

/// `e^z K_nu(z)` by the trapezoidal rule on `exp(-z (cosh t - 1)) cosh(nu t)`.
fn k_quadrature_scaled(nu: f64, z: f64) -> f64 {
    let h = 1.0 / 32.0;
    let mut sum = 0.5;
    let mut k = 1.0;
    loop {
        let t: f64 = k * h;
        let v = (-z * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        sum += v;
        if v < 1e-18 * sum {
            return h * sum;
        }
        k += 1.0;
    }
}

fn check_positive(z: f64) {
    assert!(z > 0.0, "K_nu is defined for z > 0, got {z}");
}

fn k0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        harmonic += 1.0 / k;
        sum += harmonic * term;
        if term * harmonic < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    -((0.5 * z).ln() + EULER_GAMMA) * i_series(0, z) + sum
}

/// `K_1 = 1/z + ln(z/2) I_1 - (z/4) sum (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)`.
fn k1_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut psi_k1 = -EULER_GAMMA;
    let mut psi_k2 = 1.0 - EULER_GAMMA;
    let mut sum = psi_k1 + psi_k2;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + 1.0));
        psi_k1 += 1.0 / k;
        psi_k2 += 1.0 / (k + 1.0);
        let add = (psi_k1 + psi_k2) * term;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    1.0 / z + (0.5 * z).ln() * i_series(1, z) - 0.25 * z * sum
}

fn k_quadrature(nu: f64, z: f64) -> f64 {
    (-z).exp() * k_quadrature_scaled(nu, z)
}

fn k_large(nu: f64, z: f64) -> f64 {
    (PI / (2.0 * z)).sqrt() * (-z).exp() * large_argument_series(nu, z, 1.0)
}

fn i_large(nu: f64, z: f64) -> f64 {
    z.exp() / (2.0 * PI * z).sqrt() * large_argument_series(nu, z, -1.0)
}

pub fn bessel_k0(z: f64) -> f64 {
    check_positive(z);
    if z <= SERIES_K_MAX {
        k0_series(z)
    } else if z <= QUADRATURE_K_MAX {
        k_quadrature(0.0, z)
    } else {
        k_large(0.0, z)
    }
}

pub fn bessel_k1(z: f64) -> f64 {
    check_positive(z);
    if z <= SERIES_K_MAX {
        k1_series(z)
    } else if z <= QUADRATURE_K_MAX {
        k_quadrature(1.0, z)
    } else {
        k_large(1.0, z)
    }
}

/// `(I_0(z), K_0(z))` for `z > 0`.
pub fn bessel_i0_k0(z: f64) -> (f64, f64) {
    (bessel_i0(z), bessel_k0(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (z, I0, K0, I1, K1) from 40-digit arithmetic.
    const TABLE: &[(f64, f64, f64, f64, f64)] = &[
        (0.001, 1.000000250000015625, 7.0236888005623813436, 0.00050000006250000260417, 999.99623815608557428),
        (0.01, 1.000025000156250434, 4.7212447301610949651, 0.0050000625002604172092, 99.973894118296247643),
        (0.1, 1.0025015629340956014, 2.4270690247020166125, 0.050062526047092692114, 9.8538447808706061348),
        (0.5, 1.0634833707413235193, 0.92441907122766586178, 0.25789430539089631636, 1.6564411200033008937),
        (1.0, 1.2660658777520083356, 0.42102443824070833334, 0.56515910399248502721, 0.60190723019723457474),
        (2.0, 2.2795853023360672674, 0.11389387274953343565, 1.5906368546373290634, 0.13986588181652242728),
        (3.5, 7.3782034322254796603, 0.019598897170368489108, 6.2058349222583654736, 0.022239392925923833739),
        (5.0, 27.239871823604446895, 0.0036910983340425942747, 24.335642142450527199, 0.0040446134454521642084),
        (8.0, 427.56411572180478518, 0.0001464707052228153871, 399.87313678256009822, 0.00015536921180500113392),
        (8.5, 683.16192699011560928, 0.000086257566349325077619, 641.6199025400667608, 0.000091197247750068985436),
        (12.0, 18948.925349296308861, 2.2008253973114914005e-6, 18141.348781638831601, 2.2907574647671878159e-6),
        (20.0, 43558282.559553533272, 5.7412378153365242927e-10, 42454973.385127770181, 5.8830579695570381777e-10),
        (30.0, 781672297823.97748972, 2.1324774964630563712e-14, 768532038938.95699949, 2.1677320018915494249e-14),
        (50.0, 2.9325537838493363267e+20, 3.4101677497894955139e-23, 2.9030785901035567968e+20, 3.4441022267175556126e-23),
    ];

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn matches_reference_table() {
        for &(z, i0, k0, i1, k1) in TABLE {
            assert!(rel(bessel_i0(z), i0) < 1e-13, "I0({z})");
            assert!(rel(bessel_k0(z), k0) < 1e-12, "K0({z}) = {}", bessel_k0(z));
            assert!(rel(bessel_i1(z), i1) < 1e-13, "I1({z})");
            assert!(rel(bessel_k1(z), k1) < 1e-12, "K1({z}) = {}", bessel_k1(z));
        }
    }

    #[test]
    fn branches_agree_at_switch_points() {
        for &z in &[1.5, SERIES_K_MAX, 2.5] {
            assert!(rel(k0_series(z), k_quadrature(0.0, z)) < 1e-13, "K0 at {z}");
            assert!(rel(k1_series(z), k_quadrature(1.0, z)) < 1e-13, "K1 at {z}");
        }
        for &z in &[20.0, QUADRATURE_K_MAX, 30.0] {
            assert!(rel(k_quadrature(0.0, z), k_large(0.0, z)) < 1e-13, "K0 at {z}");
            assert!(rel(k_quadrature(1.0, z), k_large(1.0, z)) < 1e-13, "K1 at {z}");
        }
        for &z in &[25.0, SERIES_I_MAX, 35.0] {
            assert!(rel(i_series(0, z), i_large(0.0, z)) < 1e-13, "I0 at {z}");
            assert!(rel(i_series(1, z), i_large(1.0, z)) < 1e-13, "I1 at {z}");
        }
    }

    #[test]
    fn small_argument_law() {
        let z: f64 = 0.01;
        let approx = -z.ln() + 2f64.ln() - EULER_GAMMA;
        // The next term, (z^2/4)(1 - gamma - ln(z/2)), is 1.4e-4 here.
        assert!(((bessel_k0(z) - approx) / approx).abs() < 1e-4);
        let next = 0.25 * z * z * (1.0 - EULER_GAMMA - (0.5 * z).ln());
        assert!((bessel_k0(z) - approx - next).abs() < 1e-8);
        assert_eq!(bessel_i0(0.0), 1.0);
    }

    #[test]
    fn wronskian() {
        for &z in &[0.05, 1.0, 2.0, 4.0, 10.0, 40.0] {
            let w = bessel_i0(z) * bessel_k1(z) + bessel_i1(z) * bessel_k0(z);
            assert!(rel(w, 1.0 / z) < 1e-12, "z = {z}: {w}");
        }
    }

    #[test]
    fn positive_and_finite() {
        let mut z = 1e-6;
        while z < 600.0 {
            let (i0, k0) = bessel_i0_k0(z);
            assert!(i0.is_finite() && i0 > 0.0);
            assert!(k0.is_finite() && k0 > 0.0, "K0({z})");
            z *= 1.3;
        }
    }
}
