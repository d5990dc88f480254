//! Stationary, parabolic and homogeneous inpainting from a random 10% mask.

use pdeinpaint::mask::random_mask;
use pdeinpaint::noise::l2_error;
use pdeinpaint::pnm::read_pnm;
use pdeinpaint::solver::{run_parabolic, solve_homogeneous, MaskSchedule, solve_stationary, SolveSpec};
use pdeinpaint::ImageGrid;

fn main() -> pdeinpaint::Result<()> {
    let f = read_pnm(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/lena256.pgm"))?;
    let mask = random_mask(f.width(), f.height(), 0.1, 0)?;
    let spec = SolveSpec::with_alpha(3.0);

    let u = solve_stationary(&f, &mask, &spec)?;
    println!("stationary   alpha 3: {:.2}", l2_error(&u, &f)?);

    let u = solve_homogeneous(&f, &mask, &spec)?;
    println!("homogeneous         : {:.2}", l2_error(&u, &f)?);

    let zero = ImageGrid::zeros(f.width(), f.height())?;
    for steps in [10, 100] {
        let states = run_parabolic(&zero, &f, MaskSchedule::Fixed(&mask), &spec, steps)?;
        let u = states.last().unwrap();
        println!("parabolic {steps:>3} steps: {:.2}", l2_error(u, &f)?);
    }
    Ok(())
}
