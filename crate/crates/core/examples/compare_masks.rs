//! Threshold and halftoned masks from the stationary and H1 criteria.

use pdeinpaint::codec::{reconstruct, CodecConfig, DecodeMode};
use pdeinpaint::mask::{encode_mask, MaskKind, MaskStrategy};
use pdeinpaint::noise::l2_error;
use pdeinpaint::pnm::{read_pnm, write_pbm};

fn main() -> pdeinpaint::Result<()> {
    let f = read_pnm(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/lena256.pgm"))?;
    let out = std::env::temp_dir();
    let kinds = [
        MaskKind::OptThreshold,
        MaskKind::OptHalftone,
        MaskKind::H1Threshold,
        MaskKind::H1Halftone,
        MaskKind::Random,
    ];
    for kind in kinds {
        let strategy = MaskStrategy::new(kind, 0.1, 3.0);
        let cfg = CodecConfig::new(strategy).with_decode(DecodeMode::Stationary);
        let mask = encode_mask(&f, &strategy)?.mask;
        let u = reconstruct(&mask, &f, &cfg)?;
        let path = out.join(format!("mask_{}.pbm", kind.name()));
        write_pbm(&mask, &path)?;
        println!("{:<14} {:>5} pixels  |u - f| = {:7.2}  {}", kind.name(), mask.count(), l2_error(&u, &f)?, path.display());
    }
    Ok(())
}
