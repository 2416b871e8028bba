//! Simulates a free-running and a gated detector and summarizes both streams.
//!
//!     cargo run --release --example simulate_detector

use sra_diag::sim::{simulate, SimConfig};
use sra_diag::timestamps::{inter_arrivals, AcquisitionMode};

fn main() -> sra_diag::Result<()> {
    let free = SimConfig {
        dark_rate: 1e-3,
        afterpulse_prob: 0.05,
        ap_alpha: 1.5,
        ap_xmin_ns: 200.0,
        dead_time_ns: 50,
        duration_ns: 1e8,
        seed: 1,
        ..Default::default()
    };
    let gated = SimConfig {
        mode: AcquisitionMode::Gated,
        gate_period_ns: Some(100),
        ..free.clone()
    };

    for (name, cfg) in [("free-run", &free), ("gated 100 ns", &gated)] {
        let series = simulate(cfg)?;
        let ia = inter_arrivals(&series, true)?;
        let min = ia.intervals().iter().copied().fold(f64::INFINITY, f64::min);
        println!(
            "{name:>12}: {} events, mean gap {:.1} ns, shortest gap {min} ns",
            series.len(),
            ia.mean()
        );
    }
    Ok(())
}
