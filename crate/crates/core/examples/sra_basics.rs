//! Builds an SRA curve from a handful of samples and reads the ECDF off it.
//!
//!     cargo run --example sra_basics

use sra_diag::sra::{build_sra, ecdf_from_sra, resample_sra};

fn main() -> sra_diag::Result<()> {
    let samples = [3.0, 1.0, 2.0, 5.0, 2.0];
    let curve = build_sra(&samples)?;
    println!("rank  x     F(x)");
    for n in 1..=curve.len() {
        let p = ecdf_from_sra(&curve, n)?;
        println!("{n:>4}  {:<4}  {:.2}", p.x, p.f);
    }

    let coarse = resample_sra(&curve, 3)?;
    println!("resampled to 3 ranks: {:?}", coarse.values());
    Ok(())
}
