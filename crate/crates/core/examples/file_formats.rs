//! Writes a simulated stream in both tick formats, reads it back with its
//! sidecar, and stores the SRA curve as CSV.
//!
//!     cargo run --example file_formats

use std::fs::File;

use sra_diag::sim::{read_ground_truth, simulate, write_simulation, SimConfig};
use sra_diag::sra::{build_sra, read_sra_csv, write_sra_csv};
use sra_diag::timestamps::{inter_arrivals, read_series, TickFormat};

fn main() -> sra_diag::Result<()> {
    let dir = std::env::temp_dir().join("sra-diag-formats");
    std::fs::create_dir_all(&dir)?;
    let cfg = SimConfig {
        duration_ns: 1e6,
        seed: 9,
        ..Default::default()
    };
    let series = simulate(&cfg)?;

    for name in ["ticks.txt", "ticks.bin"] {
        let path = dir.join(name);
        let format = TickFormat::from_path(&path);
        write_simulation(&path, &series, &cfg, format)?;
        let back = read_series(&path, format)?;
        let truth = read_ground_truth(&path)?;
        println!(
            "{}: {} ticks, {} bytes, seed {} from sidecar",
            path.display(),
            back.len(),
            std::fs::metadata(&path)?.len(),
            truth.simulation.seed
        );
    }

    let curve = build_sra(inter_arrivals(&series, true)?.intervals())?;
    let csv_path = dir.join("ticks.sra.csv");
    write_sra_csv(&curve, File::create(&csv_path)?)?;
    let again = read_sra_csv(File::open(&csv_path)?)?;
    println!("{}: {} ranks, round trip exact: {}", csv_path.display(), again.len(), again == curve);
    Ok(())
}
