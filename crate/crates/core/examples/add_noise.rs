//! Gaussian and impulse noise on the Lena test image.

use pdeinpaint::noise::{apply_noise, l2_error, NoiseKind, NoiseSpec};
use pdeinpaint::pnm::read_pnm;

fn main() -> pdeinpaint::Result<()> {
    let f = read_pnm(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/lena256.pgm"))?;
    for sigma in [0.02, 0.05, 0.1] {
        let noisy = apply_noise(&f, &NoiseSpec::gaussian(sigma, 0))?;
        println!("gaussian sigma {sigma:<5} |f_n - f| = {:.3}", l2_error(&noisy, &f)?);
    }
    for kind in [NoiseKind::Salt, NoiseKind::Pepper, NoiseKind::SaltPepper] {
        let noisy = apply_noise(&f, &NoiseSpec::impulse(kind, 0.01, 0))?;
        println!("{kind:?} 1%: |f_n - f| = {:.3}", l2_error(&noisy, &f)?);
    }
    Ok(())
}
