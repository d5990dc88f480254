//! Encode to a container, write it, read it back and decode.

use pdeinpaint::codec::{decode, encode, CodecConfig, Container};
use pdeinpaint::mask::{MaskKind, MaskStrategy};
use pdeinpaint::noise::l2_error;
use pdeinpaint::pnm::{read_pnm, write_pnm};

fn main() -> pdeinpaint::Result<()> {
    let f = read_pnm(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/lena256.pgm"))?;
    let cfg = CodecConfig::new(MaskStrategy::new(MaskKind::L2Insta, 0.1, 10.0).with_steps(10));

    let encoded = encode(&f, &cfg)?;
    let bytes = Container::gray(&encoded, &cfg).to_bytes()?;
    let path = std::env::temp_dir().join("lena.pic");
    std::fs::write(&path, &bytes)?;
    println!("container {} bytes ({} raw)", bytes.len(), f.len());

    let container = Container::from_bytes(&std::fs::read(&path)?)?;
    let stored = container.gray_encoded()?;
    let u = decode(&stored.mask, &stored.values, &container.codec_config(&cfg))?;
    write_pnm(&u, std::env::temp_dir().join("lena_decoded.pgm"), 255)?;
    println!("|u - f| = {:.2}", l2_error(&u, &f)?);
    Ok(())
}
