//! Per-channel against shared-luminance masks on a colour image.

use pdeinpaint::codec::{decode_color, encode_color, CodecConfig, ColorStrategy};
use pdeinpaint::mask::{MaskKind, MaskStrategy};
use pdeinpaint::pnm::read_ppm;

fn main() -> pdeinpaint::Result<()> {
    let img = read_ppm(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/astronaut128.ppm"))?;
    let cfg = CodecConfig::new(MaskStrategy::new(MaskKind::OptHalftone, 0.1, 3.0));
    for strategy in [ColorStrategy::PerChannel, ColorStrategy::SharedLuminance] {
        let encoded = encode_color(&img, &cfg, strategy)?;
        let u = decode_color(&encoded, &cfg)?;
        println!("{strategy:?}: {} masks, |u - f| = {:.2}", encoded.masks.len(), u.l2_error(&img)?);
    }
    Ok(())
}
