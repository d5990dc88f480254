//! Mask sequences of the time-dependent encoders on a 64x64 crop.

use pdeinpaint::mask::{encode_mask, MaskKind, MaskStrategy};
use pdeinpaint::pnm::read_pnm;

fn main() -> pdeinpaint::Result<()> {
    let f = read_pnm(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/lena256.pgm"))?.crop(96, 96, 64, 64)?;
    for kind in [MaskKind::L2Dec, MaskKind::L2Inc, MaskKind::L2Insta, MaskKind::L2Sta] {
        let strategy = MaskStrategy::new(kind, 0.1, 3.0).with_steps(5);
        let result = encode_mask(&f, &strategy)?;
        let counts: Vec<usize> = result.iterates.iter().map(|m| m.count()).collect();
        println!("{:<8} final {:>4}  rounds {counts:?}", kind.name(), result.mask.count());
    }
    Ok(())
}
