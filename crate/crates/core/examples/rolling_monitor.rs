//! Monitors a stream whose dark rate doubles halfway through, using a
//! threshold calibrated on a quiet baseline.
//!
//!     cargo run --release --example rolling_monitor

use sra_diag::diagnostics::{calibrate_threshold, rolling_diagnose, MonitorConfig, Verdict};
use sra_diag::sim::{simulate, simulate_segments, SimConfig};
use sra_diag::timestamps::inter_arrivals;

fn main() -> sra_diag::Result<()> {
    let w = 10_000;
    let segment = |rate: f64, seed: u64| SimConfig {
        dark_rate: rate,
        duration_ns: 4e7,
        seed,
        ..Default::default()
    };
    let stream = simulate_segments(&[segment(1e-3, 1), segment(2e-3, 2)])?;
    let baseline = inter_arrivals(&simulate(&SimConfig { duration_ns: 5e7, ..segment(1e-3, 3) })?, true)?;

    let mut config = MonitorConfig::new(w, w / 2, 1.0)?;
    config.threshold = calibrate_threshold(&baseline, w, 100, 1, &config)?;
    println!("calibrated threshold {:.3}", config.threshold);

    let out = rolling_diagnose(&stream, &baseline, &config)?;
    if let Some(note) = &out.note {
        println!("note: {note}");
    }
    for r in &out.reports {
        let (a, b) = r.window_span.unwrap_or((0, 0));
        let mark = if r.verdict == Verdict::Drift { "DRIFT" } else { "" };
        println!("{:>12} .. {:>12} ns  distance {:.3}  {mark}", a, b, r.distance);
    }
    Ok(())
}
