//! Bessel values, the disc problem, the epsilon sweep and the theta lattice.

use pdeinpaint::asymptotics::{
    bessel_i0, bessel_k0, disc_closed_form_error, epsilon_sweep_topograd, linear_fit, log_spaced, solve_disc_radial,
    theta_experiment,
};
use pdeinpaint::validate::sweep_source;

fn main() -> pdeinpaint::Result<()> {
    for z in [0.1, 1.0, 5.0] {
        println!("I0({z}) = {:.12}  K0({z}) = {:.12}", bessel_i0(z), bessel_k0(z));
    }

    let grid = solve_disc_radial(0.1, 1.0, 1.0)?;
    println!("disc radial vs closed form: {:.2e}", disc_closed_form_error(&grid, 1.0, 1.0));

    let sweep = epsilon_sweep_topograd(&sweep_source(), 1.0, &log_spaced(1e-2, 1e-3, 4))?;
    println!("epsilon sweep slope {:.4}, coefficient ratio {:.4}", sweep.slope, sweep.ratio());

    let rows = theta_experiment(&[0.05, 0.1, 0.2, 0.3], &[1], 10.0, 128)?;
    let x: Vec<f64> = rows.iter().map(|r| r.m.ln().abs()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.energy).collect();
    let (a, b, r2) = linear_fit(&x, &y);
    println!("theta at 128^2: F = {a:.4} + {b:.4} |ln m|, R^2 {r2:.4}");
    Ok(())
}
