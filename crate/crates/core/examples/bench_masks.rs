//! Mask comparison benchmark written as CSV to stdout.

use pdeinpaint::bench::{run_mask_comparison, write_records, BenchOptions, MaskMethod};
use pdeinpaint::pnm::read_pnm;

fn main() -> anyhow::Result<()> {
    let f = read_pnm(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/lena256.pgm"))?;
    let opts = BenchOptions {
        noisy_presmooth: 0.0,
        ..Default::default()
    };
    let records = run_mask_comparison("lena", &f, &[0.0, 0.1], &MaskMethod::ALL, 0.1, 3.0, 0, &opts)?;
    write_records(&records, std::io::stdout())?;
    Ok(())
}
