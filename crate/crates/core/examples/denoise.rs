//! Denoising by sparse inpainting against a linear diffusion baseline.

use pdeinpaint::codec::{denoise, linear_diffusion, CodecConfig, DenoiseScheme};
use pdeinpaint::mask::{MaskKind, MaskStrategy};
use pdeinpaint::noise::{apply_noise, l2_error, NoiseSpec};
use pdeinpaint::pnm::read_pnm;

fn main() -> pdeinpaint::Result<()> {
    let f = read_pnm(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/lena256.pgm"))?;
    let noisy = apply_noise(&f, &NoiseSpec::gaussian(0.05, 0))?;
    println!("noisy              {:.2}", l2_error(&noisy, &f)?);

    let strategy = MaskStrategy::new(MaskKind::L2Inc, 0.22, 18.0).with_steps(40).with_presmooth(1.0);
    let cfg = CodecConfig::new(strategy);
    let u = denoise(&noisy, &cfg, DenoiseScheme::Source)?;
    println!("L2Inc source       {:.2}", l2_error(&u, &f)?);

    let strategy = MaskStrategy::new(MaskKind::L2Inc, 0.22, 5.0).with_steps(6).with_presmooth(1.0);
    let u = denoise(&noisy, &CodecConfig::new(strategy), DenoiseScheme::Evolving)?;
    println!("L2Inc evolving     {:.2}", l2_error(&u, &f)?);

    let u = linear_diffusion(&noisy, 0.6)?;
    println!("linear diffusion   {:.2}", l2_error(&u, &f)?);
    Ok(())
}
