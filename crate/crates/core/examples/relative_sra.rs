//! Compares a probe stream with a baseline through the relative SRA and
//! prints a few points of the curve.
//!
//!     cargo run --release --example relative_sra

use sra_diag::diagnostics::{compare_windows, MonitorConfig};
use sra_diag::sim::{simulate, SimConfig};
use sra_diag::timestamps::inter_arrivals;

fn stream(rate: f64, seed: u64) -> sra_diag::Result<sra_diag::timestamps::InterArrivalSeries> {
    let cfg = SimConfig {
        dark_rate: rate,
        duration_ns: 1.2e4 / rate,
        seed,
        ..Default::default()
    };
    inter_arrivals(&simulate(&cfg)?, true)
}

fn main() -> sra_diag::Result<()> {
    let baseline = stream(1e-3, 1)?;
    let config = MonitorConfig::new(10_000, 10_000, 0.5)?;
    for (label, probe) in [("same rate", stream(1e-3, 2)?), ("double rate", stream(2e-3, 3)?)] {
        let report = compare_windows(&probe, &baseline, &config)?;
        println!("{label}: distance {:.3} -> {:?}", report.distance, report.verdict);
        for (b, d) in report.relative.points().step_by(200) {
            println!("    baseline {b:>9.1} ns  delta {d:>+9.1} ns");
        }
    }
    Ok(())
}
