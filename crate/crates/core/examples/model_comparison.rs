//! Fits all three noise models to the inter-arrival histogram of a
//! dark-count dominated stream and compares them at short delays.
//!
//!     cargo run --release --example model_comparison

use sra_diag::fit::{fit_density, histogram_density, region_rms_log, Binning};
use sra_diag::models::ModelKind;
use sra_diag::sim::{simulate, SimConfig};
use sra_diag::timestamps::inter_arrivals;

fn main() -> sra_diag::Result<()> {
    let cfg = SimConfig {
        dark_rate: 5e-4,
        afterpulse_prob: 0.1,
        ap_alpha: 1.2,
        ap_xmin_ns: 100.0,
        dead_time_ns: 100,
        duration_ns: 2e9,
        seed: 3,
        ..Default::default()
    };
    let ia = inter_arrivals(&simulate(&cfg)?, true)?;
    let hist = histogram_density(&ia, 100, Binning::Log)?;

    println!("{:<11} {:>10} {:>14}", "model", "rms (all)", "rms (< 3 us)");
    for kind in ModelKind::ALL {
        match fit_density(&hist, kind, None) {
            Ok(fit) => {
                let short = region_rms_log(&hist, &fit.model, 0.0, 3000.0).unwrap_or(f64::NAN);
                println!("{:<11} {:>10.3} {:>14.3}", kind.name(), fit.residual_rms_log, short);
            }
            Err(e) => println!("{:<11} failed: {e}", kind.name()),
        }
    }
    Ok(())
}
